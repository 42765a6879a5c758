// SPDX-License-Identifier: Apache-2.0
#include "ppiref/structure.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "cif.hpp"
#include "ppiref/error.hpp"

namespace ppiref {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Fixed-column field; short lines yield an empty view.
std::string_view column(std::string_view line, std::size_t first, std::size_t last) {
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - (first - 1));
}

bool is_water(std::string_view resname) {
  return resname == "HOH" || resname == "WAT" || resname == "DOD" || resname == "H2O" || resname == "SOL";
}

std::string element_from_atom_name(std::string_view name) {
  for (char c : name)
    if (std::isalpha(static_cast<unsigned char>(c))) return std::string(1, static_cast<char>(std::toupper(c)));
  return {};
}

[[noreturn]] void bad_record(std::size_t line, const std::string& what) {
  fail(ErrorCode::UnparsableRecord, "line " + std::to_string(line) + ": " + what);
}

// One coordinate record in file-format independent form.
struct AtomRecord {
  bool hetatm = false;
  std::string atom_name;
  char altloc = ' ';
  std::string resname;
  std::string chain;
  int seq = 0;
  char icode = ' ';
  Eigen::Vector3d xyz;
  double occupancy = 1.0;
  std::string element;
};

// Accumulates records into chains/residues while applying the retention rules.
class StructureBuilder {
 public:
  void add(const AtomRecord& rec) {
    if (is_water(rec.resname)) return;
    const bool polymer = rec.hetatm ? is_amino_acid_code(rec.resname) : !is_nucleotide_code(rec.resname);
    if (!polymer) return;
    std::string element = rec.element.empty() ? element_from_atom_name(rec.atom_name) : upper(rec.element);
    if (is_hydrogen_element(element)) return;

    Residue& res = residue(rec);
    for (Atom& existing : res.atoms) {
      if (existing.name != rec.atom_name) continue;
      if (rec.altloc != ' ' && rec.occupancy > existing.occupancy) {
        existing.position = rec.xyz;
        existing.occupancy = rec.occupancy;
        existing.element = element;
      }
      return;
    }
    Atom atom;
    atom.name = rec.atom_name;
    atom.element = std::move(element);
    atom.position = rec.xyz;
    atom.occupancy = rec.occupancy;
    atom.is_heavy = true;
    res.atoms.push_back(std::move(atom));
  }

  Structure finish(std::string entry_id, std::string method, std::optional<double> resolution) {
    Structure s;
    s.entry_id = std::move(entry_id);
    s.method = std::move(method);
    s.resolution = resolution;
    s.chains = std::move(chains_);
    if (s.chains.empty()) fail(ErrorCode::EmptyStructure, "no polymer residues in entry '" + s.entry_id + "'");
    return s;
  }

 private:
  Residue& residue(const AtomRecord& rec) {
    auto cit = chain_index_.find(rec.chain);
    if (cit == chain_index_.end()) {
      cit = chain_index_.emplace(rec.chain, chains_.size()).first;
      chains_.push_back(Chain{rec.chain, {}});
    }
    Chain& chain = chains_[cit->second];
    const auto key = std::make_tuple(rec.chain, rec.seq, rec.icode);
    auto rit = residue_index_.find(key);
    if (rit == residue_index_.end()) {
      rit = residue_index_.emplace(key, chain.residues.size()).first;
      Residue r;
      r.chain_id = rec.chain;
      r.seq_number = rec.seq;
      r.insertion_code = rec.icode;
      r.name = rec.resname;
      r.aa = from_three_letter(rec.resname);
      chain.residues.push_back(std::move(r));
    }
    return chain.residues[rit->second];
  }

  std::vector<Chain> chains_;
  std::map<std::string, std::size_t> chain_index_;
  std::map<std::tuple<std::string, int, char>, std::size_t> residue_index_;
};

std::string normalize_methods(const std::vector<std::string>& methods) {
  std::string out;
  for (const auto& m : methods) {
    const std::string t = lower(trim(m));
    if (t.empty()) continue;
    if (!out.empty()) out += "; ";
    out += t;
  }
  return out;
}

Structure parse_pdb(std::string_view content, std::string_view fallback_id) {
  StructureBuilder builder;
  std::string entry_id;
  std::string expdta;
  std::optional<double> resolution;
  bool seen_model = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::string_view record = column(line, 1, 6);
    if (record.starts_with("HEADER")) {
      entry_id = std::string(trim(column(line, 63, 66)));
    } else if (record.starts_with("EXPDTA")) {
      if (!expdta.empty()) expdta += ' ';
      expdta += std::string(trim(column(line, 11, 80)));
    } else if (record == "REMARK" && trim(column(line, 7, 10)) == "2") {
      const std::string_view text = column(line, 11, 80);
      const auto at = text.find("RESOLUTION.");
      if (at != std::string_view::npos) {
        std::istringstream in{std::string(text.substr(at + 11))};
        std::string number;
        in >> number;
        if (auto v = to_double(number)) resolution = *v;
      }
    } else if (record.starts_with("MODEL")) {
      if (seen_model) break;  // model 1 only
      seen_model = true;
    } else if (record.starts_with("ENDMDL")) {
      break;
    } else if (record == "ATOM  " || record == "HETATM" || record == "ATOM") {
      if (line.size() < 54) bad_record(line_no, "coordinate record shorter than 54 columns");
      AtomRecord rec;
      rec.hetatm = record == "HETATM";
      rec.atom_name = std::string(trim(column(line, 13, 16)));
      rec.altloc = line[16];
      rec.resname = std::string(trim(column(line, 18, 20)));
      rec.chain = std::string(column(line, 22, 22));
      if (rec.chain == " ") rec.chain = "_";
      auto seq = to_int(column(line, 23, 26));
      if (!seq) bad_record(line_no, "bad residue number '" + std::string(column(line, 23, 26)) + "'");
      rec.seq = *seq;
      rec.icode = line[26];
      auto x = to_double(column(line, 31, 38));
      auto y = to_double(column(line, 39, 46));
      auto z = to_double(column(line, 47, 54));
      if (!x || !y || !z) bad_record(line_no, "malformed coordinate field");
      rec.xyz = Eigen::Vector3d(*x, *y, *z);
      const std::string_view occ = trim(column(line, 55, 60));
      if (!occ.empty()) {
        auto o = to_double(occ);
        if (!o || *o < 0.0 || *o > 1.0) bad_record(line_no, "occupancy '" + std::string(occ) + "' outside [0,1]");
        rec.occupancy = *o;
      }
      rec.element = std::string(trim(column(line, 77, 78)));
      builder.add(rec);
    }
  }

  std::vector<std::string> methods;
  std::string_view rest = expdta;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    methods.emplace_back(rest.substr(0, semi));
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  if (entry_id.empty()) entry_id = std::string(fallback_id);
  return builder.finish(std::move(entry_id), normalize_methods(methods), resolution);
}

Structure parse_mmcif(std::string_view content, std::string_view fallback_id) {
  const cif::Block block = cif::parse_first_block(content);

  auto pick = [&](std::initializer_list<std::string_view> tags) -> const cif::Column* {
    for (auto t : tags)
      if (const cif::Column* c = block.find(t)) return c;
    return nullptr;
  };
  const cif::Column* group = pick({"_atom_site.group_PDB"});
  const cif::Column* symbol = pick({"_atom_site.type_symbol"});
  const cif::Column* atom_id = pick({"_atom_site.auth_atom_id", "_atom_site.label_atom_id"});
  const cif::Column* alt = pick({"_atom_site.label_alt_id"});
  const cif::Column* comp = pick({"_atom_site.auth_comp_id", "_atom_site.label_comp_id"});
  const cif::Column* asym = pick({"_atom_site.auth_asym_id", "_atom_site.label_asym_id"});
  const cif::Column* seq = pick({"_atom_site.auth_seq_id", "_atom_site.label_seq_id"});
  const cif::Column* ins = pick({"_atom_site.pdbx_PDB_ins_code"});
  const cif::Column* cx = pick({"_atom_site.Cartn_x"});
  const cif::Column* cy = pick({"_atom_site.Cartn_y"});
  const cif::Column* cz = pick({"_atom_site.Cartn_z"});
  const cif::Column* occ = pick({"_atom_site.occupancy"});
  const cif::Column* model = pick({"_atom_site.pdbx_PDB_model_num"});
  if (!atom_id || !comp || !asym || !seq || !cx || !cy || !cz)
    fail(ErrorCode::EmptyStructure, "mmCIF has no usable _atom_site loop");

  StructureBuilder builder;
  const std::size_t n = cx->values.size();
  std::optional<std::string_view> first_model;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line = cx->lines[i];
    if (model) {
      if (!first_model) first_model = model->values[i];
      if (model->values[i] != *first_model) continue;
    }
    AtomRecord rec;
    rec.hetatm = group && group->values[i] == "HETATM";
    rec.atom_name = std::string(atom_id->values[i]);
    rec.altloc = (alt && !cif::is_null(alt->values[i])) ? alt->values[i].front() : ' ';
    rec.resname = std::string(comp->values[i]);
    rec.chain = std::string(asym->values[i]);
    auto s = to_int(seq->values[i]);
    if (!s) bad_record(line, "bad residue number '" + std::string(seq->values[i]) + "'");
    rec.seq = *s;
    rec.icode = (ins && !cif::is_null(ins->values[i])) ? ins->values[i].front() : ' ';
    auto x = to_double(cx->values[i]);
    auto y = to_double(cy->values[i]);
    auto z = to_double(cz->values[i]);
    if (!x || !y || !z) bad_record(line, "malformed coordinate field");
    rec.xyz = Eigen::Vector3d(*x, *y, *z);
    if (occ && !cif::is_null(occ->values[i])) {
      auto o = to_double(occ->values[i]);
      if (!o || *o < 0.0 || *o > 1.0) bad_record(line, "occupancy outside [0,1]");
      rec.occupancy = *o;
    }
    if (symbol && !cif::is_null(symbol->values[i])) rec.element = std::string(symbol->values[i]);
    builder.add(rec);
  }

  std::vector<std::string> methods;
  if (const cif::Column* m = block.find("_exptl.method"))
    for (auto v : m->values)
      if (!cif::is_null(v)) methods.emplace_back(v);

  std::optional<double> resolution;
  for (auto tag : {"_refine.ls_d_res_high", "_em_3d_reconstruction.resolution", "_reflns.d_resolution_high"}) {
    if (auto v = block.first(tag))
      if (auto d = to_double(*v)) {
        resolution = *d;
        break;
      }
  }
  std::string entry_id(block.first("_entry.id").value_or(block.name));
  if (entry_id.empty()) entry_id = std::string(fallback_id);
  return builder.finish(std::move(entry_id), normalize_methods(methods), resolution);
}

}  // namespace

bool is_hydrogen_element(std::string_view element) {
  const std::string e = upper(trim(element));
  return e == "H" || e == "D";
}

const Atom* Residue::find_atom(std::string_view atom_name) const {
  for (const Atom& a : atoms)
    if (a.name == atom_name) return &a;
  return nullptr;
}

std::string Residue::label() const {
  std::string out = chain_id + ":" + std::to_string(seq_number);
  if (insertion_code != ' ') out += insertion_code;
  return out;
}

std::size_t Chain::atom_count() const {
  std::size_t n = 0;
  for (const auto& r : residues) n += r.atoms.size();
  return n;
}

const Chain* Structure::find_chain(std::string_view id) const {
  for (const Chain& c : chains)
    if (c.id == id) return &c;
  return nullptr;
}

std::size_t Structure::residue_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.residues.size();
  return n;
}

std::size_t Structure::atom_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.atom_count();
  return n;
}

StructureFormat sniff_format(std::string_view content) {
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = trim(content.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("data_") || line.starts_with("loop_") || line.front() == '_') return StructureFormat::Mmcif;
    return StructureFormat::Pdb;
  }
  return StructureFormat::Pdb;
}

Structure parse_structure(std::string_view content, StructureFormat format, std::string_view fallback_id) {
  if (format == StructureFormat::Auto) format = sniff_format(content);
  return format == StructureFormat::Mmcif ? parse_mmcif(content, fallback_id) : parse_pdb(content, fallback_id);
}

Structure read_structure(const std::string& path, StructureFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "cannot read " + path);
  const std::filesystem::path p(path);
  if (format == StructureFormat::Auto) {
    const std::string ext = lower(p.extension().string());
    if (ext == ".cif" || ext == ".mmcif") format = StructureFormat::Mmcif;
    else if (ext == ".pdb" || ext == ".ent") format = StructureFormat::Pdb;
  }
  return parse_structure(buf.str(), format, p.stem().string());
}

std::string write_pdb(const Structure& s) {
  std::string out;
  char line[96];
  if (!s.entry_id.empty()) {
    std::snprintf(line, sizeof line, "HEADER    %-40s%9s   %-4.4s\n", "", "", s.entry_id.c_str());
    out += line;
  }
  if (!s.method.empty()) {
    std::string m = upper(s.method);
    std::snprintf(line, sizeof line, "EXPDTA    %-.70s\n", m.c_str());
    out += line;
  }
  if (s.resolution) {
    std::snprintf(line, sizeof line, "REMARK   2 RESOLUTION.  %7.2f ANGSTROMS.\n", *s.resolution);
    out += line;
  }
  int serial = 1;
  for (const Chain& chain : s.chains) {
    if (chain.id.size() != 1)
      fail(ErrorCode::InvalidArgument, "chain id '" + chain.id + "' does not fit the PDB format");
    for (const Residue& r : chain.residues) {
      // Modified residues (MSE, SEP, ...) are written back as HETATM.
      const bool het = is_amino_acid_code(r.name) && three_letter(from_three_letter(r.name)) != upper(r.name);
      for (const Atom& a : r.atoms) {
        // Four-character names start in column 13, shorter ones in 14.
        char name[5];
        if (a.name.size() >= 4) std::snprintf(name, sizeof name, "%-4.4s", a.name.c_str());
        else std::snprintf(name, sizeof name, " %-3.3s", a.name.c_str());
        std::snprintf(line, sizeof line, "%-6s%5d %4s %3.3s %c%4d%c   %8.3f%8.3f%8.3f%6.2f%6.2f          %2.2s\n",
                      het ? "HETATM" : "ATOM", serial % 100000, name, r.name.c_str(), chain.id[0], r.seq_number,
                      r.insertion_code, a.position.x(), a.position.y(), a.position.z(), a.occupancy, 0.0,
                      a.element.c_str());
        out += line;
        ++serial;
      }
    }
    out += "TER\n";
  }
  out += "END\n";
  return out;
}

}  // namespace ppiref
