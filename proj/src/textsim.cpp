#include "relrec/textsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "relrec/error.hpp"

namespace relrec::textsim {

namespace fs = std::filesystem;

std::vector<Document> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected a document object");
    }
    Document d;
    d.id = j["id"].get<std::string>();
    if (!is_valid_paper_id(d.id)) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad paper id " + d.id);
    }
    d.title = j.value("title", "");
    d.abstract = j.value("abstract", "");
    if (j.contains("fulltext") && j["fulltext"].is_string()) d.fulltext = j["fulltext"].get<std::string>();
    docs.push_back(std::move(d));
  }
  return docs;
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& d : docs) {
    nlohmann::json j{{"id", d.id}, {"title", d.title}, {"abstract", d.abstract}};
    if (d.fulltext) j["fulltext"] = *d.fulltext;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Reference sections

namespace {

struct Line {
  std::size_t begin;
  std::string_view text;  // without the line terminator
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back({pos, text.substr(pos, end - pos)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

const std::regex& heading_regex(ReferenceRule rule) {
  static const auto flags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;
  static const std::regex references(R"(^\s*(\d{0,2}|[IVX]{0,4})\.?[ ]*REFERENCES\.?\s*$)", flags);
  static const std::regex acknowledgments(R"(^\s*(\d{0,2}|[IVX]{0,4})\.?[ ]*ACKNOWLEDGE?MENTS?\s*$)", flags);
  static const std::regex bibliography(R"(^\s*(\d{0,2}|[IVX]{0,4})\.?[ ]*(Bibliograph(y|ie))\s*$)", flags);
  static const std::regex support(R"(work.{0,20}(partly)?.{0,20}support)", flags);
  switch (rule) {
    case ReferenceRule::References: return references;
    case ReferenceRule::Acknowledgments: return acknowledgments;
    case ReferenceRule::Bibliography: return bibliography;
    default: return support;
  }
}

// Cheap substring test so the regex only runs on plausible lines.
std::string_view keyword(ReferenceRule rule) {
  switch (rule) {
    case ReferenceRule::References: return "references";
    case ReferenceRule::Acknowledgments: return "acknowledg";
    case ReferenceRule::Bibliography: return "bibliograph";
    default: return "support";
  }
}

std::vector<std::size_t> heading_matches(const std::vector<Line>& lines, ReferenceRule rule) {
  std::vector<std::size_t> hits;
  const auto& re = heading_regex(rule);
  const auto key = keyword(rule);
  for (const auto& line : lines) {
    const auto text = trim_cr(line.text);
    const auto low = lower(text);
    if (low.find(key) == std::string::npos) continue;
    const std::string s(text);
    if (rule == ReferenceRule::SupportNote) {
      std::smatch m;
      if (std::regex_search(s, m, re)) hits.push_back(line.begin + static_cast<std::size_t>(m.position(0)));
    } else if (std::regex_match(s, re)) {
      hits.push_back(line.begin);
    }
  }
  return hits;
}

// One enumerated bibliography entry: optional "[", the number, a separator of
// " ", ". " or "] ", and 10 to 700 characters of text on the same line.
struct EntryStyle {
  bool bracket;
  std::string_view separator;
};

std::optional<std::size_t> entry_tail(std::string_view line, unsigned number, const EntryStyle& style) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (style.bracket) {
    if (i >= line.size() || line[i] != '[') return std::nullopt;
    ++i;
  }
  const auto digits = std::to_string(number);
  if (line.substr(i, digits.size()) != digits) return std::nullopt;
  i += digits.size();
  if (line.substr(i, style.separator.size()) != style.separator) return std::nullopt;
  i += style.separator.size();
  return line.size() - i;
}

bool enumeration_at(const std::vector<Line>& lines, std::size_t k, const EntryStyle& style) {
  for (unsigned number = 1; number <= 10; ++number) {
    if (number > 1) {
      ++k;
      while (k < lines.size() && blank(lines[k].text)) ++k;
      if (k >= lines.size()) return false;
    }
    const auto tail = entry_tail(trim_cr(lines[k].text), number, style);
    if (!tail) return false;
    if (number < 10) {
      if (*tail < 10 || *tail > 700) return false;
      // Every entry up to the ninth must be terminated by a newline.
      if (k + 1 >= lines.size()) return false;
    }
  }
  return true;
}

std::vector<std::size_t> enumeration_matches(const std::vector<Line>& lines) {
  static const EntryStyle styles[] = {{false, " "}, {false, ". "}, {false, "] "},
                                      {true, " "},  {true, ". "},  {true, "] "}};
  std::vector<std::size_t> hits;
  // The first entry must follow a newline.
  for (std::size_t k = 1; k < lines.size(); ++k) {
    for (const auto& style : styles) {
      if (enumeration_at(lines, k, style)) {
        hits.push_back(lines[k].begin);
        break;
      }
    }
  }
  return hits;
}

}  // namespace

StrippedText strip_references(std::string_view text) {
  const auto lines = split_lines(text);
  const std::size_t half = text.size() / 2;
  for (int r = 1; r <= 5; ++r) {
    const auto rule = static_cast<ReferenceRule>(r);
    const auto hits = rule == ReferenceRule::Enumeration ? enumeration_matches(lines) : heading_matches(lines, rule);
    if (hits.empty()) continue;
    const auto late = std::count_if(hits.begin(), hits.end(), [&](std::size_t p) { return p >= half; });
    if (late >= 2) continue;
    const std::size_t cut = hits.back();
    return {std::string(text.substr(0, cut)), rule, cut};
  }
  return {std::string(text), std::nullopt, text.size()};
}

// ---------------------------------------------------------------------------
// Tokens

std::unordered_set<std::string> default_stop_list() {
  static const char* const words[] = {
      // English function words
      "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are",
      "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
      "can", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each", "either",
      "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers",
      "herself", "him", "himself", "his", "how", "however", "if", "in", "into", "is", "it", "its",
      "itself", "just", "may", "me", "might", "more", "most", "must", "my", "myself", "no", "nor",
      "not", "now", "of", "off", "on", "once", "one", "only", "or", "other", "our", "ours",
      "ourselves", "out", "over", "own", "same", "she", "should", "so", "some", "such", "than",
      "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
      "this", "those", "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "very",
      "was", "we", "were", "what", "when", "where", "whether", "which", "while", "who", "whom",
      "why", "will", "with", "within", "without", "would", "yet", "you", "your", "yours",
      "yourself", "yourselves", "hence", "therefore", "where", "whereas", "via", "let", "two",
      "three", "first", "second", "use", "used", "using", "show", "shown", "given", "obtain",
      "obtained", "paper", "present", "consider", "case", "well", "since", "see", "find", "found",
      // extraction artifacts: labels, roman numerals, formula fragments
      "eq", "eqs", "fig", "figs", "ref", "refs", "et", "al", "ie", "eg", "cf", "ii", "iii", "iv",
      "vi", "vii", "viii", "ix", "xi", "xii", "xx", "xy", "xyz", "ij", "ik", "jk", "mn", "mu", "nu",
      "dx", "dy", "dz", "dt", "cos", "sin", "tan", "exp", "log", "ln", "lim", "max", "min", "sup",
      "inf", "det", "tr", "mod", "const", "rm", "mathrm", "frac", "sqrt", "cdot", "ldots", "dots",
      "alpha", "beta", "gamma", "delta", "epsilon", "lambda", "sigma", "omega", "phi", "psi",
      "rho", "tau", "theta", "kappa", "pi", "chi", "eta", "zeta", "xi", "partial", "nabla",
  };
  return {std::begin(words), std::end(words)};
}

namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

struct Run {
  std::size_t begin;
  std::size_t end;
};

std::vector<Run> letter_runs(std::string_view text) {
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_letter(text[i])) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    while (i < text.size() && is_letter(text[i])) ++i;
    runs.push_back({b, i});
  }
  return runs;
}

std::string lowered(std::string_view text, const Run& r) {
  std::string s(text.substr(r.begin, r.end - r.begin));
  for (auto& c : s) c = to_lower(c);
  return s;
}

// True if the gap between two runs is a hyphen at the end of a line.
bool line_end_hyphen(std::string_view gap) {
  if (gap.empty() || gap.front() != '-') return false;
  std::size_t i = 1;
  while (i < gap.size() && (gap[i] == ' ' || gap[i] == '\t' || gap[i] == '\r')) ++i;
  if (i >= gap.size() || gap[i] != '\n') return false;
  ++i;
  while (i < gap.size() && (gap[i] == ' ' || gap[i] == '\t')) ++i;
  return i == gap.size();
}

}  // namespace

std::vector<std::string> raw_words(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& r : letter_runs(text)) words.push_back(lowered(text, r));
  return words;
}

void count_words(std::string_view text, Dictionary& dict) {
  for (const auto& r : letter_runs(text)) ++dict[lowered(text, r)];
}

std::vector<std::string> tokenize(std::string_view text, const Dictionary& dict,
                                  const std::unordered_set<std::string>& stop, std::size_t* joined) {
  std::vector<std::string> tokens;
  const auto emit = [&](std::string word) {
    if (word.size() >= 2 && !stop.count(word)) tokens.push_back(std::move(word));
  };
  const auto runs = letter_runs(text);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    auto word = lowered(text, runs[k]);
    if (k + 1 < runs.size() &&
        line_end_hyphen(text.substr(runs[k].end, runs[k + 1].begin - runs[k].end))) {
      auto whole = word + lowered(text, runs[k + 1]);
      const auto it = dict.find(whole);
      if (it != dict.end() && it->second >= kDehyphenMinCount) {
        if (joined) ++*joined;
        emit(std::move(whole));
        ++k;
        continue;
      }
    }
    emit(std::move(word));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Weights

Lexicon::Lexicon(const std::vector<std::vector<std::string>>& doc_terms, std::size_t documents)
    : documents_(documents) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& terms : doc_terms) {
    for (const auto& t : terms) ++counts[t];
  }
  terms_.reserve(counts.size());
  for (const auto& [t, n] : counts) terms_.push_back(t);
  std::sort(terms_.begin(), terms_.end());
  df_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    df_.push_back(counts[terms_[i]]);
    lookup_.emplace(terms_[i], static_cast<Index>(i));
  }
}

Lexicon::Lexicon(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t documents)
    : terms_(std::move(terms)), df_(std::move(df)), documents_(documents) {
  if (terms_.size() != df_.size()) throw Error(ErrorCode::InvalidArgument, "lexicon term/df size mismatch");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorCode::InvalidArgument, "lexicon terms must be sorted and unique");
    }
    if (df_[i] == 0 || df_[i] > documents_) {
      throw Error(ErrorCode::InvalidArgument, "document frequency out of range for " + terms_[i]);
    }
    lookup_.emplace(terms_[i], static_cast<Index>(i));
  }
}

std::optional<Index> Lexicon::find(std::string_view term) const {
  const auto it = lookup_.find(std::string(term));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

double Lexicon::idf(Index t) const {
  return std::log2(static_cast<double>(documents_) / static_cast<double>(df(t)));
}

TermVector tfidf(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  std::unordered_map<Index, double> tf;
  for (const auto& token : tokens) {
    const auto t = lexicon.find(token);
    if (!t) throw Error(ErrorCode::UnknownTerm, token);
    tf[*t] += 1.0;
  }
  std::vector<std::pair<Index, double>> cells(tf.begin(), tf.end());
  std::sort(cells.begin(), cells.end());
  TermVector v(lexicon.size());
  v.reserve(static_cast<Index>(cells.size()));
  for (const auto& [t, f] : cells) v.insertBack(t) = f * lexicon.idf(t);
  return v;
}

double cosine(const TermVector& u, const TermVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

std::string_view to_string(Mode mode) { return mode == Mode::Meta ? "meta" : "fulltext"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "meta") return Mode::Meta;
  if (text == "fulltext") return Mode::FullText;
  return std::nullopt;
}

std::string compose(const Document& doc, Mode mode) {
  std::string text = doc.title + "\n" + doc.abstract;
  if (mode == Mode::FullText && doc.fulltext) text += "\n" + strip_references(*doc.fulltext).body;
  return text;
}

// ---------------------------------------------------------------------------
// Index

TextIndex TextIndex::build(const std::vector<Document>& docs, Mode mode,
                           const std::unordered_set<std::string>& stop, IndexStats* stats) {
  IndexStats local;
  IndexStats& st = stats ? *stats : local;
  st = IndexStats{};

  TextIndex index;
  index.mode_ = mode;
  std::vector<PaperId> ids;
  ids.reserve(docs.size());
  for (const auto& d : docs) ids.push_back(d.id);
  index.catalog_ = relmat::PaperCatalog(ids);
  if (static_cast<std::size_t>(index.catalog_.size()) != docs.size()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate document ids in corpus");
  }

  // Pass 1: compose texts and count the raw word dictionary.
  std::vector<std::string> texts(docs.size());
  Dictionary dict;
  for (const auto& d : docs) {
    const auto i = static_cast<std::size_t>(*index.catalog_.index_of(d.id));
    std::string text = d.title + "\n" + d.abstract;
    if (mode == Mode::FullText && d.fulltext) {
      auto stripped = strip_references(*d.fulltext);
      ++st.stripped[stripped.rule ? static_cast<int>(*stripped.rule) : 0];
      text += "\n" + stripped.body;
    }
    count_words(text, dict);
    texts[i] = std::move(text);
  }

  // Pass 2: tokens, document frequencies and term frequencies.
  std::vector<std::vector<std::string>> tokens(texts.size());
  std::vector<std::vector<std::string>> distinct(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    tokens[i] = tokenize(texts[i], dict, stop, &st.joined_hyphenations);
    distinct[i] = tokens[i];
    std::sort(distinct[i].begin(), distinct[i].end());
    distinct[i].erase(std::unique(distinct[i].begin(), distinct[i].end()), distinct[i].end());
  }
  index.lexicon_ = Lexicon(distinct, texts.size());

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& token : tokens[i]) {
      triplets.emplace_back(*index.lexicon_.find(token), static_cast<Index>(i), 1.0);
    }
  }
  index.tf_.resize(index.lexicon_.size(), static_cast<Index>(texts.size()));
  index.tf_.setFromTriplets(triplets.begin(), triplets.end());
  index.finish();

  st.documents = texts.size();
  st.terms = static_cast<std::size_t>(index.lexicon_.size());
  st.postings = static_cast<std::size_t>(index.tf_.nonZeros());
  return index;
}

void TextIndex::finish() {
  tf_.makeCompressed();
  weights_ = tf_;
  for (Index k = 0; k < weights_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(weights_, k); it; ++it) {
      it.valueRef() *= lexicon_.idf(it.row());
    }
  }
  norms_.resize(weights_.cols());
  for (Index d = 0; d < weights_.cols(); ++d) norms_(d) = weights_.col(d).norm();
}

TermVector TextIndex::vector(std::string_view id) const {
  const auto d = catalog_.index_of(id);
  if (!d) throw Error(ErrorCode::UnknownDocument, std::string(id));
  return weights_.col(*d);
}

void TextIndex::save(const std::string& dir) const {
  fs::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("meta.tsv");
    out << "mode\t" << to_string(mode_) << "\ndocuments\t" << lexicon_.documents() << '\n';
  }
  {
    auto out = open("lexicon.tsv");
    for (Index t = 0; t < lexicon_.size(); ++t) out << lexicon_.term(t) << '\t' << lexicon_.df(t) << '\n';
  }
  {
    auto out = open("docs.tsv");
    for (Index d = 0; d < catalog_.size(); ++d) out << d << '\t' << catalog_.id(d) << '\n';
  }
  {
    auto out = open("postings.tsv");
    const Eigen::SparseMatrix<double, Eigen::RowMajor> by_term = tf_;
    for (Index t = 0; t < by_term.outerSize(); ++t) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_term, t); it; ++it) {
        out << lexicon_.term(t) << '\t' << it.col() << '\t' << static_cast<long long>(it.value()) << '\n';
      }
    }
  }
}

namespace {

std::vector<std::vector<std::string>> read_tsv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream s(line);
    std::string f;
    while (std::getline(s, f, '\t')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::size_t to_size(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, path.string() + ": bad number '" + s + "'");
  }
}

}  // namespace

TextIndex TextIndex::load(const std::string& dir) {
  const fs::path root(dir);
  TextIndex index;
  std::size_t documents = 0;
  for (const auto& row : read_tsv_rows(root / "meta.tsv")) {
    if (row.size() < 2) continue;
    if (row[0] == "mode") {
      const auto m = parse_mode(row[1]);
      if (!m) throw Error(ErrorCode::Parse, "unknown index mode " + row[1]);
      index.mode_ = *m;
    } else if (row[0] == "documents") {
      documents = to_size(row[1], root / "meta.tsv");
    }
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  for (const auto& row : read_tsv_rows(root / "lexicon.tsv")) {
    if (row.size() != 2) throw Error(ErrorCode::Parse, "lexicon.tsv: expected term<TAB>df");
    terms.push_back(row[0]);
    df.push_back(to_size(row[1], root / "lexicon.tsv"));
  }
  index.lexicon_ = Lexicon(std::move(terms), std::move(df), documents);

  std::vector<PaperId> ids;
  for (const auto& row : read_tsv_rows(root / "docs.tsv")) {
    if (row.size() != 2 || to_size(row[0], root / "docs.tsv") != ids.size()) {
      throw Error(ErrorCode::Parse, "docs.tsv: expected consecutive index<TAB>id rows");
    }
    ids.push_back(row[1]);
  }
  index.catalog_ = relmat::PaperCatalog(ids);
  if (index.catalog_.ids() != ids || ids.size() != documents) {
    throw Error(ErrorCode::Parse, "docs.tsv does not match the document count or order");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& row : read_tsv_rows(root / "postings.tsv")) {
    if (row.size() != 3) throw Error(ErrorCode::Parse, "postings.tsv: expected term<TAB>doc<TAB>tf");
    const auto t = index.lexicon_.find(row[0]);
    if (!t) throw Error(ErrorCode::UnknownTerm, row[0]);
    const auto d = to_size(row[1], root / "postings.tsv");
    if (d >= documents) throw Error(ErrorCode::Parse, "postings.tsv: document index out of range");
    triplets.emplace_back(*t, static_cast<Index>(d), static_cast<double>(to_size(row[2], root / "postings.tsv")));
  }
  index.tf_.resize(index.lexicon_.size(), static_cast<Index>(documents));
  index.tf_.setFromTriplets(triplets.begin(), triplets.end());
  index.finish();
  return index;
}

// ---------------------------------------------------------------------------
// Queries

std::vector<Index> query_terms(const TermVector& v, const Lexicon& lexicon, std::size_t k_query) {
  (void)lexicon;  // term ids follow lexicographic order, so ties break by term
  std::vector<std::pair<double, Index>> weighted;
  for (TermVector::InnerIterator it(v); it; ++it) {
    if (it.value() > 0.0) weighted.emplace_back(it.value(), it.index());
  }
  const auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const std::size_t k = std::min(k_query, weighted.size());
  std::partial_sort(weighted.begin(), weighted.begin() + static_cast<std::ptrdiff_t>(k), weighted.end(), better);
  std::vector<Index> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(weighted[i].second);
  return out;
}

std::vector<ScoredPaper> rank_similar(const TextIndex& index, std::string_view id, std::size_t n,
                                      std::size_t k_query) {
  const auto self = index.catalog_.index_of(id);
  if (!self) throw Error(ErrorCode::UnknownDocument, std::string(id));
  if (n == 0) return {};
  auto terms = query_terms(index.weights_.col(*self), index.lexicon_, k_query);
  if (terms.empty()) return {};
  std::sort(terms.begin(), terms.end());
  TermVector query(index.lexicon_.size());
  for (const auto t : terms) query.insertBack(t) = 1.0;
  const double query_norm = std::sqrt(static_cast<double>(terms.size()));

  const Eigen::SparseVector<double> dots = index.weights_.transpose() * query;
  relmat::TopN<double> top(n);
  for (Eigen::SparseVector<double>::InnerIterator it(dots); it; ++it) {
    const Index d = it.index();
    if (d == *self || it.value() <= 0.0 || index.norms_(d) == 0.0) continue;
    top.push(d, it.value() / (query_norm * index.norms_(d)));
  }
  return relmat::to_scored({*self, top.take()}, index.catalog_);
}

}  // namespace relrec::textsim
