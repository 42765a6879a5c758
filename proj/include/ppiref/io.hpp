// SPDX-License-Identifier: Apache-2.0
//
// File formats shared by the command-line tools.
//
// Embeddings (binary, little-endian):
//   "IDST" | u8 version = 1 | u32 count | u32 dim
//   count x { u16 id length | id bytes (UTF-8) | dim x f32 }
// Values are stored in single precision. The rounding error per coordinate
// is below 2^-24 relative; embedding entries lie in [-0.25, 0.5], so a
// 20-dim distance moves by less than 1e-7, far inside the 0.03 threshold.
//
// Probability matrices (binary, little-endian):
//   "PMAT" | u32 N | N x 20 f64, row major, columns in amino_acid.hpp order
// or CSV with a `chain,residue` key followed by 20 amino-acid columns named
// by one- or three-letter code.

#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppiref/ddg.hpp"
#include "ppiref/dedup.hpp"
#include "ppiref/filter.hpp"
#include "ppiref/idist.hpp"
#include "ppiref/interface.hpp"
#include "ppiref/metrics.hpp"

namespace ppiref {

std::string read_file(const std::string& path);
/// Writes bytes verbatim; Error(Io) on failure.
void write_file(const std::string& path, const std::string& content);

// --- CSV -------------------------------------------------------------------

/// Comma separated, double quotes escape commas and quotes ("" inside).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_field(const std::string& value);

/// Rows keyed by header names. Columns are looked up case-insensitively.
class CsvTable {
 public:
  explicit CsvTable(const std::string& text, std::string origin = "csv");
  std::size_t size() const { return rows_.size(); }
  bool has_column(const std::string& name) const;
  /// Error(Format) naming the origin when none of the names is present.
  std::size_t column(std::initializer_list<const char*> names) const;
  const std::string& at(std::size_t row, std::size_t column) const;
  /// 1-based line of a data row (for diagnostics).
  std::size_t line(std::size_t row) const { return lines_[row]; }
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

double parse_double(const std::string& text, const std::string& what);

// --- Interface manifest (JSON lines) ----------------------------------------

struct ManifestEntry {
  std::string id;
  std::string source;
  std::string file;  // structure path
  std::vector<std::string> chains;
  std::vector<std::size_t> n_residues;  // parallel to chains
  double cutoff = kPpirefCutoff;
  std::optional<std::string> method;
  std::optional<double> resolution;
  std::optional<double> bsa;

  bool operator==(const ManifestEntry&) const = default;
};

ManifestEntry manifest_entry(const Interface& interface, const std::string& file);
std::string write_manifest(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_manifest(const std::string& text, const std::string& origin = "manifest");

// --- Embeddings ------------------------------------------------------------

std::string encode_embeddings(const std::vector<InterfaceEmbedding>& embeddings);
std::vector<InterfaceEmbedding> decode_embeddings(const std::string& bytes);
bool looks_like_embeddings(const std::string& bytes);

// --- Graphs and splits -----------------------------------------------------

/// id_a,id_b,distance with ids in graph order.
std::string write_edges_csv(const NearDuplicateGraph& graph);
/// id,fold
SplitAssignment parse_split_csv(const std::string& text, const std::string& origin = "split");
std::string write_split_csv(const SplitAssignment& split);

std::string to_json(const LeakageReport& report);
std::string to_json(const FilterReport& report);
std::string to_json(const MetricReport& report);
std::string to_json(const ComponentSummary& summary, const NearDuplicateGraph& graph);

// --- ddG inputs and outputs ------------------------------------------------

struct ResidueKey {
  std::string chain_id;
  int seq_number = 0;
  char insertion_code = ' ';

  auto operator<=>(const ResidueKey&) const = default;
};

struct ProbabilityTable {
  ProbabilityMatrix p;
  std::vector<ResidueKey> keys;  // empty for the binary format
};

std::string encode_pmat(const ProbabilityMatrix& p);
/// Detects the binary magic, otherwise parses CSV.
ProbabilityTable decode_pmat(const std::string& bytes, const std::string& origin = "pmat");

/// complex_id, mutation (or mutation_string), optional ddg_label. Rows with
/// unparsable mutations raise Error with the line number.
std::vector<MutationRecord> parse_mutation_csv(const std::string& text, const std::string& origin = "mutations");

/// complex_id,mutation,pred_ddg,true_ddg (true_ddg may be empty).
struct PredictionRow {
  std::string complex_id;
  std::string mutation;
  std::optional<double> pred;
  std::optional<double> truth;
};
std::vector<PredictionRow> parse_prediction_csv(const std::string& text, const std::string& origin = "predictions");
std::string write_prediction_csv(const std::vector<PredictionRow>& rows);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace ppiref
