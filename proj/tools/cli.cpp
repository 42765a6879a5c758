// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ppiref/ddg.hpp"
#include "ppiref/dedup.hpp"
#include "ppiref/error.hpp"
#include "ppiref/filter.hpp"
#include "ppiref/idist.hpp"
#include "ppiref/interface.hpp"
#include "ppiref/io.hpp"
#include "ppiref/log.hpp"
#include "ppiref/metrics.hpp"
#include "ppiref/parallel.hpp"
#include "ppiref/structure.hpp"

namespace ppiref::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string preset;
  double cutoff = kPpirefCutoff;
  double tau = IDistConfig::ppiref10().threshold;
  double tau_scale = 1.0;
  double alpha = IDistConfig::ppiref10().alpha;
  unsigned workers = 0;
  std::string out;
  bool quiet = false;
  bool verbose = false;

  CLI::Option* cutoff_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* preset_opt = nullptr;
};

// Resolved pipeline settings: preset values unless overridden one by one.
struct Pipeline {
  double cutoff = kPpirefCutoff;
  IDistConfig idist;
  unsigned workers = 1;
};

Pipeline resolve(const Options& o) {
  IDistPreset base = kPpiref10Preset;
  if (o.preset_opt->count() > 0) {
    base = o.preset == kDips6Preset.name ? kDips6Preset : kPpiref10Preset;
  } else if (o.cutoff_opt->count() > 0) {
    if (o.cutoff == kDipsCutoff) {
      base = kDips6Preset;
    } else if (o.cutoff != kPpirefCutoff && o.tau_opt->count() == 0) {
      log_warning("no calibrated threshold for a " + format_double(o.cutoff) + " A cutoff; using tau = " +
                  format_double(base.config.threshold));
    }
  }
  Pipeline p;
  p.cutoff = o.cutoff_opt->count() > 0 ? o.cutoff : base.cutoff;
  p.idist.alpha = o.alpha_opt->count() > 0 ? o.alpha : base.config.alpha;
  p.idist.threshold = (o.tau_opt->count() > 0 ? o.tau : base.config.threshold) * o.tau_scale;
  p.idist.validate();
  if (!(p.cutoff > 0.0)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  p.workers = o.workers > 0 ? o.workers : std::max(1u, std::thread::hardware_concurrency());
  return p;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& stream) : path_(path), stream_(stream) {}
  void write(const std::string& data) const {
    if (path_.empty() || path_ == "-") {
      stream_ << data;
      stream_.flush();
    } else {
      write_file(path_, data);
    }
  }

 private:
  std::string path_;
  std::ostream& stream_;
};

bool is_structure_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pdb" || ext == ".ent" || ext == ".cif" || ext == ".mmcif";
}

std::vector<std::string> collect_structure_files(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in, ec))
        if (entry.is_regular_file() && is_structure_file(entry.path())) found.push_back(entry.path().string());
      if (ec) fail(ErrorCode::Io, "cannot list " + in + ": " + ec.message());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  return files;
}

std::string error_text(const std::exception& e) { return e.what(); }

// Interfaces named by a manifest, re-extracted from their structure files.
struct LoadedManifest {
  std::vector<ManifestEntry> entries;
  std::vector<Interface> interfaces;            // parallel to entries
  std::map<std::string, Structure> structures;  // by file, when kept
};

LoadedManifest load_manifest(const std::string& path, unsigned workers, bool keep_structures) {
  LoadedManifest m;
  m.entries = parse_manifest(read_file(path), path);

  // Group entries by (file, cutoff) in order of first appearance.
  std::vector<std::pair<std::string, double>> sources;
  std::map<std::pair<std::string, double>, std::size_t> source_index;
  std::vector<std::size_t> entry_source(m.entries.size());
  std::set<std::string> ids;
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    const auto& e = m.entries[k];
    if (!ids.insert(e.id).second) fail(ErrorCode::Format, path + ": duplicate interface id " + e.id);
    auto key = std::make_pair(e.file, e.cutoff);
    auto [it, inserted] = source_index.emplace(key, sources.size());
    if (inserted) sources.push_back(key);
    entry_source[k] = it->second;
  }

  std::vector<Structure> structures(sources.size());
  std::vector<std::vector<Interface>> extracted(sources.size());
  std::vector<std::string> errors(sources.size());
  parallel_blocks(sources.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t s = begin; s < end; ++s) {
      try {
        structures[s] = read_structure(sources[s].first);
        extracted[s] = extract_interfaces(structures[s], sources[s].second);
      } catch (const std::exception& e) {
        errors[s] = error_text(e);
      }
    }
  });
  for (std::size_t s = 0; s < sources.size(); ++s)
    if (!errors[s].empty()) fail(ErrorCode::Io, sources[s].first + ": " + errors[s]);

  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    const auto& e = m.entries[k];
    const auto& found = extracted[entry_source[k]];
    auto it = std::find_if(found.begin(), found.end(), [&](const Interface& i) { return i.id == e.id; });
    if (it == found.end()) fail(ErrorCode::Format, path + ": interface " + e.id + " not found in " + e.file);
    const ManifestEntry fresh = manifest_entry(*it, e.file);
    if (fresh.chains != e.chains || fresh.n_residues != e.n_residues)
      fail(ErrorCode::Format, path + ": interface " + e.id + " no longer matches " + e.file);
    m.interfaces.push_back(*it);
  }
  if (keep_structures)
    for (std::size_t s = 0; s < sources.size(); ++s) m.structures.emplace(sources[s].first, std::move(structures[s]));
  return m;
}

// Embeddings from an embeddings file, or computed from a manifest.
std::vector<InterfaceEmbedding> load_embeddings(const std::string& path, const Pipeline& p,
                                                std::vector<ManifestEntry>* entries = nullptr) {
  const std::string bytes = read_file(path);
  if (looks_like_embeddings(bytes)) return decode_embeddings(bytes);
  LoadedManifest m = load_manifest(path, p.workers, false);
  if (entries) *entries = m.entries;
  return idist_embed_all(m.interfaces, p.idist, p.workers);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string normalized_mutation(const std::string& text) {
  std::string out;
  for (const auto& s : parse_mutation(text)) {
    if (!out.empty()) out += ',';
    out += s.to_string();
  }
  return out;
}

// --- subcommands -------------------------------------------------------------

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string trimmed_dir;
};

int cmd_extract(const ExtractArgs& a, const Pipeline& p, const Output& out, std::ostream& err) {
  const auto files = collect_structure_files(a.inputs);
  std::vector<std::vector<Interface>> found(files.size());
  std::vector<Structure> structures(a.trimmed_dir.empty() ? 0 : files.size());
  std::vector<std::string> errors(files.size());
  parallel_blocks(files.size(), p.workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        Structure s = read_structure(files[k]);
        found[k] = extract_interfaces(s, p.cutoff);
        if (!a.trimmed_dir.empty()) structures[k] = std::move(s);
      } catch (const std::exception& e) {
        errors[k] = error_text(e);
      }
    }
  });

  int status = 0;
  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  for (std::size_t k = 0; k < files.size(); ++k) {
    if (!errors[k].empty()) {
      err << "error: " << files[k] << ": " << errors[k] << '\n';
      status = 1;
      continue;
    }
    for (const auto& i : found[k]) {
      if (!ids.insert(i.id).second) {
        err << "error: " << files[k] << ": interface id " << i.id << " already produced by another file\n";
        status = 1;
        continue;
      }
      entries.push_back(manifest_entry(i, files[k]));
      if (!a.trimmed_dir.empty()) {
        try {
          write_file((fs::path(a.trimmed_dir) / (i.id + ".pdb")).string(), write_interface_pdb(structures[k], i));
        } catch (const std::exception& e) {
          err << "error: " << i.id << ": " << e.what() << '\n';
          status = 1;
        }
      }
    }
  }
  log_info("extracted " + std::to_string(entries.size()) + " interfaces from " + std::to_string(files.size()) +
           " files");
  out.write(write_manifest(entries));
  return status;
}

struct FilterArgs {
  std::string manifest;
  std::string report;
  std::string methods = "x-ray diffraction,electron microscopy";
  std::string max_resolution = "3.5";
  double min_bsa = 500.0;
  bool permissive = false;
};

FilterCriteria criteria_from(const FilterArgs& a) {
  if (a.permissive) return FilterCriteria::permissive();
  FilterCriteria c;
  c.allowed_methods.clear();
  const std::string lowered = [&] {
    std::string s = a.methods;
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  }();
  if (lowered != "any")
    for (const auto& m : split_list(lowered, ',')) c.allowed_methods.insert(m);
  if (a.max_resolution == "none") {
    c.max_resolution.reset();
  } else {
    c.max_resolution = parse_double(a.max_resolution, "--max-resolution");
  }
  c.min_bsa = a.min_bsa;
  c.validate();
  return c;
}

int cmd_filter(const FilterArgs& a, const Pipeline& p, const Output& out) {
  const FilterCriteria criteria = criteria_from(a);
  LoadedManifest m = load_manifest(a.manifest, p.workers, true);

  // One filter pass per structure file; results are merged in manifest order.
  std::vector<std::string> files;
  std::map<std::string, std::vector<std::size_t>> by_file;
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    auto [it, inserted] = by_file.try_emplace(m.entries[k].file);
    if (inserted) files.push_back(m.entries[k].file);
    it->second.push_back(k);
  }
  std::vector<FilterResult> results(files.size());
  parallel_blocks(files.size(), p.workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t f = begin; f < end; ++f) {
      const Structure& s = m.structures.at(files[f]);
      std::vector<Interface> group;
      for (std::size_t k : by_file.at(files[f])) group.push_back(m.interfaces[k]);
      results[f] = filter_interfaces(group, {{s.entry_id, &s}}, criteria);
    }
  });

  std::vector<const InterfaceVerdict*> verdict(m.entries.size(), nullptr);
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& idx = by_file.at(files[f]);
    for (std::size_t r = 0; r < idx.size(); ++r) verdict[idx[r]] = &results[f].report.verdicts[r];
  }
  FilterReport report;
  std::vector<ManifestEntry> kept;
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    const InterfaceVerdict& v = *verdict[k];
    report.verdicts.push_back(v);
    ++report.total;
    const auto has = [&](FilterReason r) { return std::find(v.reasons.begin(), v.reasons.end(), r) != v.reasons.end(); };
    report.pass_method += !has(FilterReason::Method);
    report.pass_resolution += !has(FilterReason::Resolution);
    report.pass_bsa += !has(FilterReason::Bsa);
    if (!v.passed()) continue;
    ++report.retained;
    ManifestEntry e = m.entries[k];
    e.method = v.method;
    e.resolution = v.resolution;
    e.bsa = v.bsa;
    kept.push_back(std::move(e));
  }
  log_info("retained " + std::to_string(report.retained) + " of " + std::to_string(report.total) + " interfaces");
  out.write(write_manifest(kept));
  if (!a.report.empty()) write_file(a.report, to_json(report));
  return 0;
}

int cmd_embed(const std::string& input, const Pipeline& p, const Output& out) {
  out.write(encode_embeddings(load_embeddings(input, p)));
  return 0;
}

struct CompareArgs {
  std::string a, b;
  std::string chains_a, chains_b;
};

InterfaceEmbedding embed_one(const std::string& path, const std::string& chains, const Pipeline& p) {
  const Structure s = read_structure(path);
  auto interfaces = extract_interfaces(s, p.cutoff);
  if (!chains.empty()) {
    const auto wanted = split_list(chains, ',');
    std::erase_if(interfaces, [&](const Interface& i) {
      auto ids = i.chain_ids();
      auto w = wanted;
      std::sort(w.begin(), w.end());
      return ids != w;
    });
  }
  if (interfaces.size() != 1) {
    std::string names;
    for (const auto& i : extract_interfaces(s, p.cutoff)) names += (names.empty() ? "" : ", ") + i.id;
    fail(ErrorCode::InvalidArgument, path + ": expected one interface, found " + std::to_string(interfaces.size()) +
                                         (names.empty() ? "" : " (available: " + names + "; select with --chains)"));
  }
  return idist_embed(interfaces.front(), p.idist);
}

int cmd_compare(const CompareArgs& a, const Pipeline& p, const Output& out) {
  const auto ea = embed_one(a.a, a.chains_a, p);
  const auto eb = embed_one(a.b, a.chains_b, p);
  const double d = idist(ea, eb);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", d);
  out.write(ea.id + '\t' + eb.id + '\t' + buf + '\t' +
            (is_near_duplicate(ea, eb, p.idist) ? "near-duplicate" : "distinct") + '\n');
  return 0;
}

struct DedupArgs {
  std::string input;
  std::string order = "lexicographic";
  std::string edges;
  std::string components;
};

int cmd_dedup(const DedupArgs& a, const Pipeline& p, const Output& out) {
  std::vector<ManifestEntry> entries;
  const auto embeddings = load_embeddings(a.input, p, &entries);
  const auto graph = build_graph(embeddings, p.idist, NeighborMode::Auto, p.workers);
  const auto retained = greedy_dedup(graph, a.order == "degree" ? DedupOrder::MaxDegreeFirst : DedupOrder::Lexicographic);
  const auto summary = connected_components(graph);
  log_info("kept " + std::to_string(retained.size()) + " of " + std::to_string(graph.size()) + " interfaces; " +
           std::to_string(graph.edges().size()) + " near-duplicate pairs");
  if (!a.edges.empty()) write_file(a.edges, write_edges_csv(graph));
  if (!a.components.empty()) write_file(a.components, to_json(summary, graph));

  const std::set<std::string> keep(retained.begin(), retained.end());
  if (!entries.empty()) {
    std::vector<ManifestEntry> kept;
    for (const auto& e : entries)
      if (keep.count(e.id)) kept.push_back(e);
    out.write(write_manifest(kept));
  } else {
    std::string text;
    for (const auto& id : retained) text += id + '\n';
    out.write(text);
  }
  return 0;
}

int cmd_audit(const std::string& input, const std::string& split_path, const Pipeline& p, const Output& out) {
  const auto embeddings = load_embeddings(input, p);
  const auto split = parse_split_csv(read_file(split_path), split_path);
  const auto graph = build_graph(embeddings, p.idist, NeighborMode::Auto, p.workers);
  const auto report = audit_split(graph, split);
  log_info("leaking " + std::to_string(report.leaking) + " of " + std::to_string(report.test_size) + " test items");
  out.write(to_json(report));
  return 0;
}

struct SafeSplitArgs {
  std::string input;
  std::string fractions = "train=0.8,validation=0.1,test=0.1";
  std::string labels;
  double label_weight = 1.0;
};

int cmd_safe_split(const SafeSplitArgs& a, const Pipeline& p, const Output& out) {
  std::vector<FoldFraction> folds;
  for (const auto& item : split_list(a.fractions, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "fraction '" + item + "' is not label=value");
    folds.push_back({item.substr(0, eq), parse_double(item.substr(eq + 1), "--fractions")});
  }
  std::map<std::string, double> labels;
  if (!a.labels.empty()) {
    const CsvTable t(read_file(a.labels), a.labels);
    const auto id = t.column({"id", "interface_id"});
    const auto value = t.column({"label", "value", "ddg"});
    for (std::size_t r = 0; r < t.size(); ++r)
      labels[t.at(r, id)] = parse_double(t.at(r, value), a.labels + ":" + std::to_string(t.line(r)));
  }
  const auto embeddings = load_embeddings(a.input, p);
  const auto graph = build_graph(embeddings, p.idist, NeighborMode::Auto, p.workers);
  const auto split = component_safe_split(graph, folds, a.labels.empty() ? nullptr : &labels, a.label_weight);
  out.write(write_split_csv(split.assignment));
  return 0;
}

struct EvalArgs {
  std::string predictions;
  std::string labels;
  bool impute = false;
  std::vector<double> percents{5.0, 10.0};
  std::string json;
};

int cmd_eval(const EvalArgs& a, const Output& out, std::ostream& err) {
  const auto rows = parse_prediction_csv(read_file(a.predictions), a.predictions);
  int status = 0;
  PredictionSet set;
  if (a.labels.empty()) {
    for (const auto& r : rows) {
      if (!r.truth) {
        err << "error: " << r.complex_id << " " << r.mutation << ": no true_ddg\n";
        status = 1;
        continue;
      }
      double pred = 0.0;
      if (r.pred) {
        pred = *r.pred;
      } else if (a.impute) {
        pred = kImputedDdg;
      } else {
        err << "error: " << r.complex_id << " " << r.mutation << ": no prediction (use --impute)\n";
        status = 1;
        continue;
      }
      set.add({r.complex_id, r.mutation, pred, *r.truth});
    }
  } else {
    std::map<std::pair<std::string, std::string>, double> preds;
    for (const auto& r : rows) {
      if (!r.pred) continue;
      const auto key = std::make_pair(r.complex_id, normalized_mutation(r.mutation));
      if (!preds.emplace(key, *r.pred).second) {
        err << "error: duplicate prediction for " << r.complex_id << " " << r.mutation << '\n';
        status = 1;
      }
    }
    std::size_t used = 0;
    for (const auto& m : parse_mutation_csv(read_file(a.labels), a.labels)) {
      std::string text;
      for (const auto& s : m.substitutions) text += (text.empty() ? "" : ",") + s.to_string();
      if (!m.label) {
        err << "error: " << m.complex_id << " " << text << ": no label\n";
        status = 1;
        continue;
      }
      auto it = preds.find({m.complex_id, text});
      double pred = 0.0;
      if (it != preds.end()) {
        pred = it->second;
        ++used;
      } else if (a.impute) {
        pred = kImputedDdg;
      } else {
        err << "error: " << m.complex_id << " " << text << ": no prediction (use --impute)\n";
        status = 1;
        continue;
      }
      set.add({m.complex_id, text, pred, *m.label});
    }
    if (used < preds.size()) log_warning(std::to_string(preds.size() - used) + " predictions have no label");
  }
  if (set.empty()) fail(ErrorCode::InvalidArgument, "no labeled predictions to evaluate");
  const MetricReport report = evaluate(set, a.percents);
  out.write(format_table(report));
  if (!a.json.empty()) write_file(a.json, to_json(report));
  return status;
}

struct ScoreArgs {
  std::string mutations;
  std::string pmat;
  std::string structure;
};

// Maps a complex's residues to probability rows.
class ScoringContext {
 public:
  ScoringContext(ProbabilityTable table, std::optional<Structure> structure)
      : table_(std::move(table)), structure_(std::move(structure)) {
    if (!table_.keys.empty()) {
      for (std::size_t r = 0; r < table_.keys.size(); ++r) rows_.emplace(table_.keys[r], static_cast<Eigen::Index>(r));
    } else {
      if (!structure_)
        fail(ErrorCode::InvalidArgument, "a binary probability matrix needs --structure to locate residues");
      Eigen::Index r = 0;
      for (const auto& c : structure_->chains)
        for (const auto& res : c.residues) rows_.emplace(ResidueKey{c.id, res.seq_number, res.insertion_code}, r++);
      if (r != table_.p.rows())
        fail(ErrorCode::DimensionMismatch, "probability matrix has " + std::to_string(table_.p.rows()) +
                                               " rows but the structure has " + std::to_string(r) + " residues");
    }
    if (structure_)
      for (const auto& c : structure_->chains)
        for (const auto& res : c.residues) native_.emplace(ResidueKey{c.id, res.seq_number, res.insertion_code}, res.aa);
  }

  double score(const std::vector<Substitution>& subs) const {
    std::vector<Eigen::Index> sites;
    std::vector<AminoAcid> wt, mut;
    for (const auto& s : subs) {
      const ResidueKey key{s.chain_id, s.position, s.insertion_code};
      auto it = rows_.find(key);
      if (it == rows_.end()) fail(ErrorCode::IndexOutOfRange, "no probability row for residue " + s.to_string());
      if (structure_) {
        auto n = native_.find(key);
        if (n != native_.end() && n->second != s.wild_type)
          fail(ErrorCode::BadAminoAcid, s.to_string() + ": structure has " + std::string(three_letter(n->second)) +
                                            " at this position");
      }
      sites.push_back(it->second);
      wt.push_back(s.wild_type);
      mut.push_back(s.mutant);
    }
    return log_odds_ddg(table_.p, sites, wt, mut);
  }

 private:
  ProbabilityTable table_;
  std::optional<Structure> structure_;
  std::map<ResidueKey, Eigen::Index> rows_;
  std::map<ResidueKey, AminoAcid> native_;
};

std::optional<std::string> find_with_extensions(const fs::path& dir, const std::string& stem,
                                                std::initializer_list<const char*> extensions) {
  for (const char* ext : extensions) {
    const fs::path candidate = dir / (stem + ext);
    if (fs::exists(candidate)) return candidate.string();
  }
  return std::nullopt;
}

int cmd_score(const ScoreArgs& a, const Output& out, std::ostream& err) {
  const auto records = parse_mutation_csv(read_file(a.mutations), a.mutations);
  const bool pmat_dir = fs::is_directory(a.pmat);
  const bool structure_dir = !a.structure.empty() && fs::is_directory(a.structure);

  std::map<std::string, std::optional<ScoringContext>> contexts;
  std::map<std::string, std::string> context_errors;
  auto context_for = [&](const std::string& complex) -> const ScoringContext& {
    if (auto e = context_errors.find(complex); e != context_errors.end()) fail(ErrorCode::InvalidArgument, e->second);
    auto it = contexts.find(complex);
    if (it != contexts.end()) return *it->second;
    try {
      std::string pmat_path = a.pmat;
      if (pmat_dir) {
        auto found = find_with_extensions(a.pmat, complex, {".pmat", ".csv"});
        if (!found) fail(ErrorCode::Io, "no probability matrix for " + complex + " in " + a.pmat);
        pmat_path = *found;
      }
      std::optional<Structure> structure;
      if (structure_dir) {
        auto found = find_with_extensions(a.structure, complex, {".pdb", ".cif", ".ent", ".mmcif"});
        if (found) structure = read_structure(*found);
      } else if (!a.structure.empty()) {
        structure = read_structure(a.structure);
      }
      auto [pos, inserted] =
          contexts.emplace(complex, ScoringContext(decode_pmat(read_file(pmat_path), pmat_path), std::move(structure)));
      return *pos->second;
    } catch (const Error& e) {
      context_errors.emplace(complex, e.detail());
      throw;
    }
  };

  int status = 0;
  std::vector<PredictionRow> rows;
  for (const auto& m : records) {
    std::string text;
    for (const auto& s : m.substitutions) text += (text.empty() ? "" : ",") + s.to_string();
    try {
      const double ddg = context_for(m.complex_id).score(m.substitutions);
      rows.push_back({m.complex_id, text, ddg, m.label});
    } catch (const Error& e) {
      err << "error: " << m.complex_id << " " << text << ": " << e.what() << '\n';
      status = 1;
    }
  }
  out.write(write_prediction_csv(rows));
  return status;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Protein-protein interface mining, deduplication and ddG evaluation", "ppiref"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style key = value file; command-line flags take precedence");

  Options o;
  o.preset_opt = app.add_option("--preset", o.preset, "Cutoff and threshold preset")
                     ->check(CLI::IsMember({std::string(kDips6Preset.name), std::string(kPpiref10Preset.name)}));
  o.cutoff_opt = app.add_option("--cutoff", o.cutoff, "Heavy-atom interface cutoff in Angstrom")
                     ->check(CLI::PositiveNumber);
  o.tau_opt = app.add_option("--tau", o.tau, "Near-duplicate threshold")->check(CLI::PositiveNumber);
  app.add_option("--tau-scale", o.tau_scale, "Multiplier applied to the threshold (1.5 relaxes it)")
      ->check(CLI::PositiveNumber);
  o.alpha_opt = app.add_option("--alpha", o.alpha, "Embedding RBF bandwidth")->check(CLI::PositiveNumber);
  app.add_option("--workers", o.workers, "Worker threads (0: all cores)");
  app.add_option("--out,-o", o.out, "Output file (default: standard output)");
  app.add_flag("--quiet,-q", o.quiet, "Only report errors");
  app.add_flag("--verbose,-v", o.verbose, "Report progress");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Extract pairwise interfaces into a manifest");
  c_extract->add_option("inputs", extract.inputs, "Structure files or directories")->required();
  c_extract->add_option("--trimmed-dir", extract.trimmed_dir, "Also write interface-only PDB files here");

  FilterArgs filter;
  auto* c_filter = app.add_subcommand("filter", "Apply method, resolution and buried-area criteria");
  c_filter->add_option("manifest", filter.manifest, "Interface manifest")->required();
  c_filter->add_option("--methods", filter.methods, "Allowed methods, comma separated, or 'any'");
  c_filter->add_option("--max-resolution", filter.max_resolution, "Resolution bound in Angstrom, or 'none'");
  c_filter->add_option("--min-bsa", filter.min_bsa, "Minimum buried surface area in square Angstrom");
  c_filter->add_flag("--permissive", filter.permissive, "Accept every interface");
  c_filter->add_option("--report", filter.report, "Write a JSON report here");

  std::string embed_input;
  auto* c_embed = app.add_subcommand("embed", "Embed the interfaces of a manifest");
  c_embed->add_option("manifest", embed_input, "Interface manifest")->required();

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Distance between the interfaces of two structures");
  c_compare->add_option("a", compare.a, "First structure")->required();
  c_compare->add_option("b", compare.b, "Second structure")->required();
  c_compare->add_option("--chains-a", compare.chains_a, "Chain pair of the first interface, e.g. A,B");
  c_compare->add_option("--chains-b", compare.chains_b, "Chain pair of the second interface");

  DedupArgs dedup;
  auto* c_dedup = app.add_subcommand("dedup", "Greedy near-duplicate removal");
  c_dedup->add_option("input", dedup.input, "Manifest or embeddings file")->required();
  c_dedup->add_option("--order", dedup.order, "Visiting order")
      ->check(CLI::IsMember({"lexicographic", "degree"}));
  c_dedup->add_option("--edges", dedup.edges, "Write near-duplicate pairs as CSV");
  c_dedup->add_option("--components", dedup.components, "Write component statistics as JSON");

  std::string audit_input, audit_split_path;
  auto* c_audit = app.add_subcommand("audit-split", "Report test items with near duplicates in other folds");
  c_audit->add_option("input", audit_input, "Manifest or embeddings file")->required();
  c_audit->add_option("split", audit_split_path, "CSV with id,fold columns")->required();

  SafeSplitArgs safe;
  auto* c_safe = app.add_subcommand("safe-split", "Split whole near-duplicate components into folds");
  c_safe->add_option("input", safe.input, "Manifest or embeddings file")->required();
  c_safe->add_option("--fractions", safe.fractions, "Fold fractions, e.g. train=0.8,validation=0.1,test=0.1");
  c_safe->add_option("--labels", safe.labels, "CSV with id,label columns to balance across folds");
  c_safe->add_option("--label-weight", safe.label_weight, "Weight of the label balance term")
      ->check(CLI::NonNegativeNumber);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval-ddg", "Per-complex metrics of ddG predictions");
  c_eval->add_option("predictions", eval.predictions, "CSV: complex_id,mutation,pred_ddg[,true_ddg]")->required();
  c_eval->add_option("--labels", eval.labels, "CSV: complex_id,mutation_string,ddg_label");
  c_eval->add_flag("--impute", eval.impute, "Use the training mean 0.69 for missing predictions");
  c_eval->add_option("--percent", eval.percents, "Percentages for precision at k")->delimiter(',');
  c_eval->add_option("--json", eval.json, "Write the report as JSON here");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score-ddg", "Log-odds ddG from amino-acid probability matrices");
  c_score->add_option("mutations", score.mutations, "CSV: complex_id,mutation_string[,ddg_label]")->required();
  c_score->add_option("--pmat", score.pmat, "Probability matrix file, or directory of <complex_id>.pmat/.csv")
      ->required();
  c_score->add_option("--structure", score.structure, "Structure file, or directory of <complex_id>.pdb/.cif");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  set_log_level(o.quiet ? LogLevel::Quiet : o.verbose ? LogLevel::Info : LogLevel::Warning);
  const Output output(o.out, out);
  try {
    const Pipeline p = resolve(o);
    if (*c_extract) return cmd_extract(extract, p, output, err);
    if (*c_filter) return cmd_filter(filter, p, output);
    if (*c_embed) return cmd_embed(embed_input, p, output);
    if (*c_compare) return cmd_compare(compare, p, output);
    if (*c_dedup) return cmd_dedup(dedup, p, output);
    if (*c_audit) return cmd_audit(audit_input, audit_split_path, p, output);
    if (*c_safe) return cmd_safe_split(safe, p, output);
    if (*c_eval) return cmd_eval(eval, output, err);
    if (*c_score) return cmd_score(score, output, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ppiref::cli
