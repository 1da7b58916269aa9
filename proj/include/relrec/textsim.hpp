#pragma once

#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "relrec/paper_id.hpp"
#include "relrec/relmat.hpp"

namespace relrec::textsim {

using relmat::Index;
using relmat::ScoredPaper;

struct Document {
  PaperId id;
  std::string title;
  std::string abstract;
  std::optional<std::string> fulltext;
};

/// One document per line: {"id", "title", "abstract", "fulltext"?}.
std::vector<Document> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<Document>& docs);

/// Which heuristic located the start of the reference section.
enum class ReferenceRule { References = 1, Acknowledgments, Bibliography, SupportNote, Enumeration };

struct StrippedText {
  std::string body;
  std::optional<ReferenceRule> rule;
  std::size_t cut = 0;  // offset of the removed suffix; text size if none
};

/// Cuts the reference section off a full text. Heuristics are tried from most
/// to least dependable; one that matches more than once in the second half of
/// the text is ambiguous and the next one is tried.
StrippedText strip_references(std::string_view text);

/// English function words plus extraction artifacts (roman numerals, formula
/// variable names, figure/equation labels).
std::unordered_set<std::string> default_stop_list();

/// Raw word counts over a corpus, used to decide line-end de-hyphenation.
using Dictionary = std::unordered_map<std::string, std::size_t>;

/// Lowercased runs of ASCII letters, without stop-word removal or joining.
std::vector<std::string> raw_words(std::string_view text);
void count_words(std::string_view text, Dictionary& dict);

inline constexpr std::size_t kDehyphenMinCount = 3;

/// Word tokens of at least two letters. A word split by a hyphen at the end of
/// a line is joined when the joined form occurs at least kDehyphenMinCount
/// times in the dictionary; otherwise both halves are kept.
std::vector<std::string> tokenize(std::string_view text, const Dictionary& dict,
                                  const std::unordered_set<std::string>& stop,
                                  std::size_t* joined = nullptr);

/// Sparse vector over lexicon term ids.
using TermVector = Eigen::SparseVector<double>;

class Lexicon {
 public:
  Lexicon() = default;
  /// `doc_terms` holds the distinct terms of each document.
  Lexicon(const std::vector<std::vector<std::string>>& doc_terms, std::size_t documents);
  Lexicon(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t documents);

  std::size_t documents() const { return documents_; }
  Index size() const { return static_cast<Index>(terms_.size()); }
  std::optional<Index> find(std::string_view term) const;
  const std::string& term(Index t) const { return terms_.at(static_cast<std::size_t>(t)); }
  std::size_t df(Index t) const { return df_.at(static_cast<std::size_t>(t)); }
  /// log2(N / n) for term t.
  double idf(Index t) const;

 private:
  std::vector<std::string> terms_;  // sorted
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, Index> lookup_;
  std::size_t documents_ = 0;
};

/// w = tf * log2(N/n). Throws UnknownTerm for tokens missing from the lexicon.
TermVector tfidf(const std::vector<std::string>& tokens, const Lexicon& lexicon);

/// dot(u,v) / (|u| |v|), 0 when either vector is zero.
double cosine(const TermVector& u, const TermVector& v);

enum class Mode { Meta, FullText };
std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Title and abstract, plus the reference-stripped full text in FullText mode.
std::string compose(const Document& doc, Mode mode);

struct IndexStats {
  std::size_t documents = 0;
  std::size_t terms = 0;
  std::size_t postings = 0;
  std::size_t joined_hyphenations = 0;
  std::size_t stripped[6] = {};  // by ReferenceRule, slot 0 = no rule found
};

/// TF-IDF weights of a corpus: a term x document sparse matrix.
class TextIndex {
 public:
  TextIndex() = default;

  static TextIndex build(const std::vector<Document>& docs, Mode mode,
                         const std::unordered_set<std::string>& stop = default_stop_list(),
                         IndexStats* stats = nullptr);

  Mode mode() const { return mode_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const relmat::PaperCatalog& catalog() const { return catalog_; }
  /// Column d holds the TF-IDF vector of document d.
  const Eigen::SparseMatrix<double>& weights() const { return weights_; }
  TermVector vector(std::string_view id) const;

  /// Directory layout: meta.tsv, lexicon.tsv, docs.tsv, postings.tsv.
  void save(const std::string& dir) const;
  static TextIndex load(const std::string& dir);

 private:
  Mode mode_ = Mode::Meta;
  Lexicon lexicon_;
  relmat::PaperCatalog catalog_;
  Eigen::SparseMatrix<double> tf_;       // raw term frequencies
  Eigen::SparseMatrix<double> weights_;
  Eigen::VectorXd norms_;

  void finish();
  friend std::vector<ScoredPaper> rank_similar(const TextIndex&, std::string_view, std::size_t,
                                               std::size_t);
};

inline constexpr std::size_t kQueryTerms = 1000;

/// The k_query highest-weighted terms of a document, best first; ties by term.
std::vector<Index> query_terms(const TermVector& v, const Lexicon& lexicon, std::size_t k_query);

/// Scores every other document by the cosine between the indicator vector of
/// the query document's top terms and the document's TF-IDF vector. Documents
/// without a shared term are left out. Throws UnknownDocument.
std::vector<ScoredPaper> rank_similar(const TextIndex& index, std::string_view id, std::size_t n,
                                      std::size_t k_query = kQueryTerms);

}  // namespace relrec::textsim
