#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "ppiref/io.hpp"
#include "ppiref/structure.hpp"
#include "support.hpp"

using namespace ppiref;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ppiref");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> ids_of(const std::string& manifest) {
  std::vector<std::string> ids;
  for (const auto& e : parse_manifest(manifest)) ids.push_back(e.id);
  return ids;
}

const std::string kStructures = support::fixture("structures");

}  // namespace

TEST_CASE("extract writes one manifest line per interface") {
  const auto r = run({"extract", kStructures, "--workers", "2"});
  REQUIRE(r.code == 0);
  const auto entries = parse_manifest(r.out);
  std::map<std::string, std::vector<std::size_t>> expected;
  for (const auto& row : support::expected_rows("expected_interfaces.csv"))
    if (row.at("cutoff") == "10")
      expected[row.at("entry") + "_" + row.at("chain_a") + "_" + row.at("chain_b")] = {
          std::stoul(row.at("n_a")), std::stoul(row.at("n_b"))};
  REQUIRE(entries.size() == expected.size());
  for (const auto& e : entries) {
    CAPTURE(e.id);
    CHECK(e.n_residues == expected.at(e.id));
    CHECK(e.cutoff == 10.0);
    CHECK(e.file.rfind(kStructures, 0) == 0);
  }
  CHECK(ids_of(r.out) == std::vector<std::string>{"2BEG_A_B", "2BEG_A_C", "2BEG_A_D", "2BEG_B_C", "2BEG_B_D",
                                                  "2BEG_B_E", "2BEG_C_D", "2BEG_C_E", "2BEG_D_E", "2XHE_A_B",
                                                  "7DDO_A_C"});
}

TEST_CASE("preset and config file select the cutoff; flags win") {
  const support::TempDir tmp;
  const std::string file = support::fixture("structures/7DDO.pdb");
  auto sizes = [](const std::string& manifest) { return parse_manifest(manifest).at(0).n_residues; };
  CHECK(sizes(run({"extract", file, "--preset", "dips6"}).out) == std::vector<std::size_t>{33, 31});
  write_file(tmp.file("ppiref.toml"), "# settings\ncutoff = 6\nworkers = 2\n");
  CHECK(sizes(run({"--config", tmp.file("ppiref.toml"), "extract", file}).out) == std::vector<std::size_t>{33, 31});
  CHECK(sizes(run({"--config", tmp.file("ppiref.toml"), "extract", file, "--cutoff", "10"}).out) ==
        std::vector<std::size_t>{75, 63});
}

TEST_CASE("empty input directory yields an empty manifest") {
  const support::TempDir tmp;
  const auto r = run({"extract", tmp.path().string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
}

TEST_CASE("unreadable files are reported and the rest is kept") {
  const support::TempDir tmp;
  write_file(tmp.file("broken.pdb"), "ATOM      1  CA  ALA A   1     abc\n");
  const auto r = run({"extract", tmp.file("broken.pdb"), support::fixture("structures/7DDO.pdb"),
                      tmp.file("missing.pdb")});
  CHECK(r.code != 0);
  CHECK(r.err.find("broken.pdb") != std::string::npos);
  CHECK(r.err.find("missing.pdb") != std::string::npos);
  CHECK(ids_of(r.out) == std::vector<std::string>{"7DDO_A_C"});
}

TEST_CASE("output does not depend on the worker count") {
  const support::TempDir tmp;
  const auto one = run({"extract", kStructures, "--workers", "1"});
  const auto many = run({"extract", kStructures, "--workers", "7"});
  REQUIRE(one.code == 0);
  CHECK(one.out == many.out);
  write_file(tmp.file("m.jsonl"), one.out);
  const auto e1 = run({"embed", tmp.file("m.jsonl"), "--workers", "1"});
  const auto e7 = run({"embed", tmp.file("m.jsonl"), "--workers", "7"});
  REQUIRE(e1.code == 0);
  CHECK(e1.out == e7.out);
  CHECK(decode_embeddings(e1.out).size() == 11);
  const auto d1 = run({"dedup", tmp.file("m.jsonl"), "--workers", "1"});
  const auto d4 = run({"dedup", tmp.file("m.jsonl"), "--workers", "4"});
  CHECK(d1.out == d4.out);
}

TEST_CASE("compare an interface with itself") {
  const std::string file = support::fixture("structures/2XHE.pdb");
  const auto r = run({"compare", file, file});
  CHECK(r.code == 0);
  CHECK(r.out == "2XHE_A_B\t2XHE_A_B\t0.000000\tnear-duplicate\n");
  const auto ambiguous = run({"compare", file, support::fixture("structures/2BEG.pdb")});
  CHECK(ambiguous.code != 0);
  CHECK(ambiguous.err.find("--chains") != std::string::npos);
  const auto chosen = run({"compare", file, support::fixture("structures/2BEG.pdb"), "--chains-b", "B,A"});
  CHECK(chosen.code == 0);
  CHECK(chosen.out.find("2BEG_A_B") != std::string::npos);
  CHECK(chosen.out.find("distinct") != std::string::npos);
}

TEST_CASE("dedup drops a renamed copy of an entry") {
  const support::TempDir tmp;
  std::string copy;
  std::istringstream in(read_file(support::fixture("structures/7DDO.pdb")));
  for (std::string line; std::getline(in, line);)
    if (line.rfind("HEADER", 0) != 0) copy += line + '\n';
  write_file(tmp.file("9DDO.pdb"), copy);
  const auto m = run({"extract", support::fixture("structures/7DDO.pdb"), tmp.file("9DDO.pdb")});
  REQUIRE(m.code == 0);
  CHECK(ids_of(m.out) == std::vector<std::string>{"7DDO_A_C", "9DDO_A_C"});
  write_file(tmp.file("m.jsonl"), m.out);
  const auto d = run({"dedup", tmp.file("m.jsonl"), "--edges", tmp.file("edges.csv"), "--components",
                      tmp.file("components.json")});
  CHECK(d.code == 0);
  CHECK(ids_of(d.out) == std::vector<std::string>{"7DDO_A_C"});
  CHECK(read_file(tmp.file("edges.csv")) == "id_a,id_b,distance\n7DDO_A_C,9DDO_A_C,0\n");
  CHECK(nlohmann::json::parse(read_file(tmp.file("components.json"))).is_object());

  const auto e = run({"embed", tmp.file("m.jsonl"), "-o", tmp.file("e.idst")});
  CHECK(e.code == 0);
  CHECK(run({"dedup", tmp.file("e.idst"), "--order", "degree"}).out == "7DDO_A_C\n");
}

TEST_CASE("a component-safe split audits clean") {
  const support::TempDir tmp;
  write_file(tmp.file("m.jsonl"), run({"extract", kStructures}).out);
  const auto s = run({"safe-split", tmp.file("m.jsonl"), "--fractions", "train=0.6,test=0.4", "--tau-scale", "1.5"});
  REQUIRE(s.code == 0);
  write_file(tmp.file("split.csv"), s.out);
  CHECK(parse_split_csv(s.out).size() == 11);
  const auto a = run({"audit-split", tmp.file("m.jsonl"), tmp.file("split.csv"), "--tau-scale", "1.5"});
  REQUIRE(a.code == 0);
  const auto report = nlohmann::json::parse(a.out);
  CHECK(report["leaking"] == 0);

  // All of 2BEG in test and everything else in train leaks nothing either;
  // splitting 2BEG's stacked strands across folds does.
  std::string leaky = "id,fold\n";
  for (const auto& e : parse_manifest(read_file(tmp.file("m.jsonl"))))
    leaky += e.id + "," + (e.id == "2BEG_B_C" ? "test" : "train") + "\n";
  write_file(tmp.file("leaky.csv"), leaky);
  const auto l = nlohmann::json::parse(run({"audit-split", tmp.file("m.jsonl"), tmp.file("leaky.csv")}).out);
  CHECK(l["leaking"] == 1);
}

TEST_CASE("uniform probabilities score zero") {
  const support::TempDir tmp;
  std::filesystem::create_directories(tmp.path() / "pmat");
  std::string csv = "chain,residue";
  for (const char* aa : {"ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET",
                         "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"})
    csv += std::string(",") + aa;
  csv += "\n";
  for (const char* key : {"H,31", "C,74"}) {
    csv += key;
    for (int a = 0; a < 20; ++a) csv += ",0.05";
    csv += "\n";
  }
  write_file(tmp.file("pmat/1TOY.csv"), csv);
  write_file(tmp.file("muts.csv"), "complex_id,mutation_string,ddg_label\n1TOY,\"TH31W,KC74Q\",1.5\n1TOY,AH32G,\n");
  const auto r = run({"score-ddg", tmp.file("muts.csv"), "--pmat", tmp.file("pmat")});
  CHECK(r.code != 0);
  CHECK(r.err.find("AH32G") != std::string::npos);
  const auto rows = parse_prediction_csv(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(*rows[0].pred == 0.0);
  CHECK(*rows[0].truth == 1.5);
}

TEST_CASE("binary probability matrices follow the structure's residue order") {
  const support::TempDir tmp;
  const std::string pdb = support::fixture("structures/7DDO.pdb");
  const Structure s = read_structure(pdb);
  const auto n = static_cast<Eigen::Index>(s.residue_count());
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, 20, 0.05);
  // Row 1 (second residue of chain A) favors its native amino acid 8:1 over Ala.
  const auto& second = s.chains[0].residues[1];
  const AminoAcid alt = second.aa == AminoAcid::Ala ? AminoAcid::Gly : AminoAcid::Ala;
  p.row(1).setZero();
  p(1, index_of(second.aa)) = 0.8;
  p(1, index_of(alt)) = 0.1;
  p(1, index_of(second.aa == AminoAcid::Trp ? AminoAcid::Tyr : AminoAcid::Trp)) = 0.1;
  write_file(tmp.file("7DDO.pmat"), encode_pmat(ProbabilityMatrix(p)));
  const std::string mutation = std::string(1, one_letter(second.aa)) + s.chains[0].id +
                               std::to_string(second.seq_number) + one_letter(alt);
  write_file(tmp.file("muts.csv"), "complex_id,mutation\n7DDO," + mutation + "\n");
  const auto r = run({"score-ddg", tmp.file("muts.csv"), "--pmat", tmp.file("7DDO.pmat"), "--structure", pdb});
  REQUIRE(r.code == 0);
  CHECK(*parse_prediction_csv(r.out).at(0).pred == doctest::Approx(std::log(8.0)).epsilon(1e-12));

  const std::string wrong = std::string(1, one_letter(alt)) + s.chains[0].id + std::to_string(second.seq_number) +
                            one_letter(second.aa);
  write_file(tmp.file("wrong.csv"), "complex_id,mutation\n7DDO," + wrong + "\n");
  const auto w = run({"score-ddg", tmp.file("wrong.csv"), "--pmat", tmp.file("7DDO.pmat"), "--structure", pdb});
  CHECK(w.code != 0);
  CHECK(w.err.find("BadAminoAcid") != std::string::npos);
  const auto no_structure = run({"score-ddg", tmp.file("muts.csv"), "--pmat", tmp.file("7DDO.pmat")});
  CHECK(no_structure.code != 0);
}

TEST_CASE("evaluation table with retrieval precision") {
  const support::TempDir tmp;
  std::string csv = "complex_id,mutation,pred_ddg,true_ddg\n";
  // 80 mutations over two complexes; the four best-ranked predictions
  // include exactly one truly stabilizing mutation.
  for (int i = 0; i < 80; ++i) {
    const double truth = (i == 2 || i == 60) ? -1.0 : 1.0 + i % 3;
    csv += std::string(i < 40 ? "1AAA" : "2BBB") + ",GA" + std::to_string(i + 1) + "A," + std::to_string(i) + "," +
           format_double(truth) + "\n";
  }
  write_file(tmp.file("pred.csv"), csv);
  const auto r = run({"eval-ddg", tmp.file("pred.csv"), "--json", tmp.file("report.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_file(tmp.file("report.json")));
  CHECK(r.out.find("P@5%") != std::string::npos);
  CHECK(r.out.find("25.00") != std::string::npos);
  CHECK(r.out.find("1AAA") != std::string::npos);
  CHECK(j.dump().find("0.25") != std::string::npos);
}

TEST_CASE("evaluation joins labels and imputes missing predictions") {
  const support::TempDir tmp;
  write_file(tmp.file("labels.csv"),
             "complex_id,mutation_string,ddg_label\n1AAA,GA1A,-1\n1AAA,\"GA2A,GA3A\",0.5\n1AAA,GA4A,2\n");
  write_file(tmp.file("pred.csv"), "complex_id,mutation,pred_ddg\n1AAA,\"GA3A,GA2A\",0.1\n1AAA,GA1A,-0.5\n");
  const auto strict = run({"eval-ddg", tmp.file("pred.csv"), "--labels", tmp.file("labels.csv")});
  CHECK(strict.code != 0);
  CHECK(strict.err.find("GA4A") != std::string::npos);
  const auto imputed = run({"eval-ddg", tmp.file("pred.csv"), "--labels", tmp.file("labels.csv"), "--impute"});
  CHECK(imputed.code == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"extract"}).code != 0);
  CHECK(run({"extract", kStructures, "--preset", "nope"}).code != 0);
  CHECK(run({"dedup", support::fixture("structures/7DDO.pdb")}).code != 0);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("safe-split") != std::string::npos);
}
