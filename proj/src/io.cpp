// SPDX-License-Identifier: Apache-2.0
#include "ppiref/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ppiref/error.hpp"

namespace ppiref {

using Json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorCode::Format, what + ": '" + text + "' is not a number");
  return v;
}

// --- CSV -------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      } else {
        rows.emplace_back();  // blank line, kept for line numbering
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) fail(ErrorCode::Format, "unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable::CsvTable(const std::string& text, std::string origin) : origin_(std::move(origin)) {
  auto rows = parse_csv(text);
  std::size_t line = 0;
  bool have_header = false;
  for (auto& r : rows) {
    ++line;
    if (r.empty() || (r.size() == 1 && trim(r[0]).empty())) continue;
    if (!have_header) {
      for (auto& h : r) header_.push_back(lower(trim(h)));
      have_header = true;
      continue;
    }
    if (r.size() != header_.size())
      fail(ErrorCode::Format, origin_ + ":" + std::to_string(line) + ": expected " + std::to_string(header_.size()) +
                                  " fields, got " + std::to_string(r.size()));
    for (auto& f : r) f = trim(f);
    rows_.push_back(std::move(r));
    lines_.push_back(line);
  }
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header_.begin(), header_.end(), lower(name)) != header_.end();
}

std::size_t CsvTable::column(std::initializer_list<const char*> names) const {
  for (const char* n : names) {
    auto it = std::find(header_.begin(), header_.end(), lower(n));
    if (it != header_.end()) return static_cast<std::size_t>(it - header_.begin());
  }
  fail(ErrorCode::Format, origin_ + ": missing column '" + std::string(*names.begin()) + "'");
}

const std::string& CsvTable::at(std::size_t row, std::size_t column) const { return rows_.at(row).at(column); }

// --- Manifest --------------------------------------------------------------

ManifestEntry manifest_entry(const Interface& interface, const std::string& file) {
  ManifestEntry e;
  e.id = interface.id;
  e.source = interface.source;
  e.file = file;
  e.cutoff = interface.cutoff;
  for (const auto& c : interface.chains) {
    e.chains.push_back(c.id);
    e.n_residues.push_back(c.residues.size());
  }
  return e;
}

std::string write_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    Json j;
    j["id"] = e.id;
    j["source"] = e.source;
    j["file"] = e.file;
    j["chains"] = e.chains;
    j["n_residues"] = e.n_residues;
    j["cutoff"] = e.cutoff;
    if (e.method) j["method"] = *e.method;
    if (e.resolution) j["resolution"] = *e.resolution;
    if (e.bsa) j["bsa"] = *e.bsa;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(const std::string& text, const std::string& origin) {
  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    try {
      const Json j = Json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.source = j.at("source").get<std::string>();
      e.file = j.at("file").get<std::string>();
      e.chains = j.at("chains").get<std::vector<std::string>>();
      e.n_residues = j.at("n_residues").get<std::vector<std::size_t>>();
      e.cutoff = j.at("cutoff").get<double>();
      if (j.contains("method")) e.method = j["method"].get<std::string>();
      if (j.contains("resolution") && !j["resolution"].is_null()) e.resolution = j["resolution"].get<double>();
      if (j.contains("bsa")) e.bsa = j["bsa"].get<double>();
      if (e.chains.size() != e.n_residues.size())
        fail(ErrorCode::Format, where + ": chains and n_residues differ in length");
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::Format, where + ": " + ex.what());
    }
  }
  return entries;
}

// --- Embeddings ------------------------------------------------------------

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::Format, what_ + ": truncated at byte " + std::to_string(pos_));
  }
  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

constexpr char kEmbeddingMagic[4] = {'I', 'D', 'S', 'T'};
constexpr std::uint8_t kEmbeddingVersion = 1;
constexpr char kPmatMagic[4] = {'P', 'M', 'A', 'T'};

}  // namespace

bool looks_like_embeddings(const std::string& bytes) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), kEmbeddingMagic, 4) == 0;
}

std::string encode_embeddings(const std::vector<InterfaceEmbedding>& embeddings) {
  const std::uint32_t dim = embeddings.empty() ? kAlphabetSize : static_cast<std::uint32_t>(embeddings.front().z.size());
  std::string out(kEmbeddingMagic, 4);
  put<std::uint8_t>(out, kEmbeddingVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(embeddings.size()));
  put<std::uint32_t>(out, dim);
  for (const auto& e : embeddings) {
    if (e.id.size() > std::numeric_limits<std::uint16_t>::max())
      fail(ErrorCode::InvalidArgument, "interface id too long: " + e.id.substr(0, 32) + "...");
    if (static_cast<std::uint32_t>(e.z.size()) != dim)
      fail(ErrorCode::DimensionMismatch, "embedding " + e.id + " has a different dimension");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(e.id.size()));
    out += e.id;
    for (Eigen::Index k = 0; k < e.z.size(); ++k) put<float>(out, static_cast<float>(e.z[k]));
  }
  return out;
}

std::vector<InterfaceEmbedding> decode_embeddings(const std::string& bytes) {
  Reader r(bytes, "embeddings");
  if (!looks_like_embeddings(bytes)) fail(ErrorCode::Format, "embeddings: bad magic");
  r.take(4);
  const auto version = r.get<std::uint8_t>();
  if (version != kEmbeddingVersion) fail(ErrorCode::Format, "embeddings: unsupported version " + std::to_string(version));
  const auto count = r.get<std::uint32_t>();
  const auto dim = r.get<std::uint32_t>();
  std::vector<InterfaceEmbedding> out;
  out.reserve(std::min<std::size_t>(count, bytes.size()));
  for (std::uint32_t k = 0; k < count; ++k) {
    InterfaceEmbedding e;
    e.id = r.take(r.get<std::uint16_t>());
    e.z.resize(dim);
    for (std::uint32_t d = 0; d < dim; ++d) e.z[d] = static_cast<double>(r.get<float>());
    out.push_back(std::move(e));
  }
  if (!r.done()) fail(ErrorCode::Format, "embeddings: trailing bytes");
  return out;
}

// --- Graphs and splits -----------------------------------------------------

std::string write_edges_csv(const NearDuplicateGraph& graph) {
  std::string out = "id_a,id_b,distance\n";
  for (const auto& e : graph.edges()) {
    out += csv_field(graph.nodes()[e.a]) + ',' + csv_field(graph.nodes()[e.b]) + ',' + format_double(e.distance);
    out += '\n';
  }
  return out;
}

SplitAssignment parse_split_csv(const std::string& text, const std::string& origin) {
  const CsvTable t(text, origin);
  const auto id = t.column({"id", "interface_id"});
  const auto fold = t.column({"fold", "split"});
  SplitAssignment split;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& key = t.at(r, id);
    if (key.empty() || t.at(r, fold).empty())
      fail(ErrorCode::Format, origin + ":" + std::to_string(t.line(r)) + ": empty id or fold");
    auto [it, inserted] = split.emplace(key, t.at(r, fold));
    if (!inserted && it->second != t.at(r, fold))
      fail(ErrorCode::Format, origin + ":" + std::to_string(t.line(r)) + ": " + key + " assigned to two folds");
  }
  return split;
}

std::string write_split_csv(const SplitAssignment& split) {
  std::string out = "id,fold\n";
  for (const auto& [id, fold] : split) out += csv_field(id) + ',' + csv_field(fold) + '\n';
  return out;
}

std::string to_json(const LeakageReport& report) {
  Json j;
  j["test_size"] = report.test_size;
  j["leaking"] = report.leaking;
  j["ratio"] = report.ratio;
  j["test_folds"] = Json::array();
  for (const auto& f : report.test_folds)
    j["test_folds"].push_back({{"label", f.label}, {"size", f.size}, {"leaking", f.leaking}, {"ratio", f.ratio}});
  j["witnesses"] = Json::array();
  for (const auto& w : report.witnesses)
    j["witnesses"].push_back({{"test_id", w.test_id},
                              {"reference_id", w.reference_id},
                              {"reference_fold", w.reference_fold},
                              {"distance", w.distance}});
  return j.dump(2) + '\n';
}

std::string to_json(const FilterReport& report) {
  Json j;
  j["total"] = report.total;
  j["pass_method"] = report.pass_method;
  j["pass_resolution"] = report.pass_resolution;
  j["pass_bsa"] = report.pass_bsa;
  j["retained"] = report.retained;
  j["interfaces"] = Json::array();
  for (const auto& v : report.verdicts) {
    Json r;
    r["id"] = v.id;
    r["method"] = v.method;
    r["resolution"] = v.resolution ? Json(*v.resolution) : Json(nullptr);
    r["bsa"] = v.bsa;
    r["passed"] = v.passed();
    r["reasons"] = Json::array();
    for (auto reason : v.reasons) r["reasons"].push_back(to_string(reason));
    j["interfaces"].push_back(std::move(r));
  }
  return j.dump(2) + '\n';
}

std::string to_json(const MetricReport& report) {
  Json j;
  j["groups"] = report.groups;
  j["mutations"] = report.items;
  Json agg = Json::object();
  for (const auto& row : report.rows)
    agg[std::string(to_string(row.metric))] = row.aggregate ? Json(*row.aggregate) : Json(nullptr);
  j["aggregate"] = std::move(agg);
  Json per = Json::object();
  for (const auto& row : report.rows) {
    Json m = Json::object();
    Json values = Json::object();
    for (const auto& [g, v] : row.values) values[g] = v;
    Json excluded = Json::object();
    for (const auto& [g, reason] : row.excluded) excluded[g] = reason;
    m["included"] = row.values.size();
    m["values"] = std::move(values);
    m["excluded"] = std::move(excluded);
    per[std::string(to_string(row.metric))] = std::move(m);
  }
  j["per_group"] = std::move(per);
  if (report.retrieval) {
    Json r;
    r["P@1"] = report.retrieval->at_one;
    for (const auto& [k, v] : report.retrieval->at_percent) r["P@" + format_double(k) + "%"] = v;
    j["retrieval"] = std::move(r);
  } else {
    j["retrieval"] = nullptr;
  }
  return j.dump(2) + '\n';
}

std::string to_json(const ComponentSummary& summary, const NearDuplicateGraph& graph) {
  Json j;
  j["nodes"] = graph.size();
  j["edges"] = graph.edges().size();
  j["components"] = summary.count();
  j["largest"] = summary.largest;
  j["largest_fraction"] = summary.largest_fraction;
  std::size_t singletons = 0;
  for (const auto& c : summary.components) singletons += c.size() == 1;
  j["singletons"] = singletons;
  return j.dump(2) + '\n';
}

// --- ddG -------------------------------------------------------------------

std::string encode_pmat(const ProbabilityMatrix& p) {
  std::string out(kPmatMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (int a = 0; a < kAlphabetSize; ++a) put<double>(out, p.values()(i, a));
  return out;
}

namespace {

ResidueKey parse_residue_key(const std::string& chain, const std::string& residue, const std::string& where) {
  ResidueKey key;
  key.chain_id = chain;
  std::string_view s = residue;
  if (!s.empty() && std::isalpha(static_cast<unsigned char>(s.back()))) {
    key.insertion_code = static_cast<char>(std::toupper(static_cast<unsigned char>(s.back())));
    s.remove_suffix(1);
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), key.seq_number);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::Format, where + ": bad residue number '" + residue + "'");
  return key;
}

}  // namespace

ProbabilityTable decode_pmat(const std::string& bytes, const std::string& origin) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kPmatMagic, 4) == 0) {
    Reader r(bytes, origin);
    r.take(4);
    const auto n = r.get<std::uint32_t>();
    if (bytes.size() != 8 + static_cast<std::size_t>(n) * kAlphabetSize * sizeof(double))
      fail(ErrorCode::Format, origin + ": size does not match " + std::to_string(n) + " rows");
    Eigen::MatrixXd p(n, kAlphabetSize);
    for (std::uint32_t i = 0; i < n; ++i)
      for (int a = 0; a < kAlphabetSize; ++a) p(i, a) = r.get<double>();
    try {
      return {ProbabilityMatrix(std::move(p)), {}};
    } catch (const Error& e) {
      fail(e.code(), origin + ": " + e.detail());
    }
  }

  const CsvTable t(bytes, origin);
  const auto chain = t.column({"chain", "chain_id"});
  const auto residue = t.column({"residue", "resnum", "position"});
  std::array<std::size_t, kAlphabetSize> cols{};
  for (int a = 0; a < kAlphabetSize; ++a) {
    const AminoAcid aa = amino_acid_at(a);
    const std::string one(1, one_letter(aa));
    const std::string three(three_letter(aa));
    if (t.has_column(one)) {
      cols[a] = t.column({one.c_str()});
    } else {
      cols[a] = t.column({three.c_str()});
    }
  }
  Eigen::MatrixXd p(static_cast<Eigen::Index>(t.size()), kAlphabetSize);
  std::vector<ResidueKey> keys;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string where = origin + ":" + std::to_string(t.line(r));
    keys.push_back(parse_residue_key(t.at(r, chain), t.at(r, residue), where));
    for (int a = 0; a < kAlphabetSize; ++a)
      p(static_cast<Eigen::Index>(r), a) = parse_double(t.at(r, cols[a]), where);
  }
  std::vector<ResidueKey> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::Format, origin + ": duplicate residue rows");
  try {
    return {ProbabilityMatrix(std::move(p)), std::move(keys)};
  } catch (const Error& e) {
    fail(e.code(), origin + ": " + e.detail());
  }
}

std::vector<MutationRecord> parse_mutation_csv(const std::string& text, const std::string& origin) {
  const CsvTable t(text, origin);
  const auto complex = t.column({"complex_id", "complex", "pdb"});
  const auto mutation = t.column({"mutation_string", "mutation", "mutations"});
  std::optional<std::size_t> label;
  if (t.has_column("ddg_label")) label = t.column({"ddg_label"});
  else if (t.has_column("ddg")) label = t.column({"ddg"});
  std::vector<MutationRecord> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string where = origin + ":" + std::to_string(t.line(r));
    MutationRecord m;
    m.complex_id = t.at(r, complex);
    if (m.complex_id.empty()) fail(ErrorCode::Format, where + ": empty complex_id");
    try {
      m.substitutions = parse_mutation(t.at(r, mutation));
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.detail());
    }
    if (label && !t.at(r, *label).empty()) m.label = parse_double(t.at(r, *label), where);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<PredictionRow> parse_prediction_csv(const std::string& text, const std::string& origin) {
  const CsvTable t(text, origin);
  const auto complex = t.column({"complex_id", "complex", "pdb"});
  const auto mutation = t.column({"mutation", "mutation_string"});
  std::optional<std::size_t> pred, truth;
  if (t.has_column("pred_ddg")) pred = t.column({"pred_ddg"});
  if (t.has_column("true_ddg")) truth = t.column({"true_ddg"});
  else if (t.has_column("ddg_label")) truth = t.column({"ddg_label"});
  if (!pred && !truth) fail(ErrorCode::Format, origin + ": needs a pred_ddg or true_ddg column");
  std::vector<PredictionRow> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string where = origin + ":" + std::to_string(t.line(r));
    PredictionRow row;
    row.complex_id = t.at(r, complex);
    row.mutation = t.at(r, mutation);
    if (pred && !t.at(r, *pred).empty()) row.pred = parse_double(t.at(r, *pred), where);
    if (truth && !t.at(r, *truth).empty()) row.truth = parse_double(t.at(r, *truth), where);
    out.push_back(std::move(row));
  }
  return out;
}

std::string write_prediction_csv(const std::vector<PredictionRow>& rows) {
  std::string out = "complex_id,mutation,pred_ddg,true_ddg\n";
  for (const auto& r : rows) {
    out += csv_field(r.complex_id) + ',' + csv_field(r.mutation) + ',';
    if (r.pred) out += format_double(*r.pred);
    out += ',';
    if (r.truth) out += format_double(*r.truth);
    out += '\n';
  }
  return out;
}

}  // namespace ppiref
