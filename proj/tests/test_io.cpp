//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"
#include "moldkl/io/checkpoint.hpp"
#include "moldkl/io/dataset.hpp"
#include "moldkl/io/files.hpp"
#include "moldkl/io/qm9.hpp"
#include "moldkl/num/rng.hpp"
#include "support/tmpdir.hpp"

using namespace moldkl;
using testsupport::TmpDir;

namespace {

const io::CsvSchema kSchema;  // id, smiles, target

}  // namespace

TEST_CASE("csv: well-formed rows load in order") {
  const std::string text =
      "id,smiles,target\n"
      "a,C,1.5\n"
      "b,CCO,-2.25\n"
      "c,c1ccccc1,0\n";
  io::LoadReport report;
  const io::Dataset ds = io::load_csv_text(text, kSchema, &report);
  REQUIRE(ds.size() == 3);
  CHECK(report.rejects.empty());
  CHECK(ds.target_name == "target");
  CHECK(ds.records[0].id == "a");
  CHECK(ds.records[1].smiles == "CCO");
  CHECK(ds.records[2].target == 0.0);
  CHECK(ds.records[1].target == -2.25);
}

TEST_CASE("csv: configurable column names and column order") {
  io::CsvSchema sc;
  sc.id_col = "name";
  sc.smiles_col = "structure";
  sc.target_col = "logp";
  const std::string text =
      "logp,name,extra,structure\n"
      "3.5,mol1,junk,CC\n";
  const io::Dataset ds = io::load_csv_text(text, sc);
  REQUIRE(ds.size() == 1);
  CHECK(ds.records[0].id == "mol1");
  CHECK(ds.records[0].smiles == "CC");
  CHECK(ds.records[0].target == 3.5);
  CHECK(ds.target_name == "logp");
}

TEST_CASE("csv: bad rows are reported, not silently kept") {
  const std::string text =
      "id,smiles,target\n"
      "a,C,1\n"
      "b,C)(,2\n"
      "c,CC,NaN\n"
      "d,CC,not_a_number\n"
      "e,CCC,3\n";
  io::LoadReport report;
  const io::Dataset ds = io::load_csv_text(text, kSchema, &report);
  REQUIRE(ds.size() == 2);
  CHECK(ds.records[0].id == "a");
  CHECK(ds.records[1].id == "e");
  REQUIRE(report.rejects.size() == 3);
  CHECK(report.rejects[0].line == 3);
  CHECK(report.rejects[0].id == "b");
  CHECK(report.rejects[1].line == 4);
  CHECK(report.rejects[2].line == 5);
}

TEST_CASE("csv: error taxonomy") {
  CHECK_THROWS_AS(io::load_csv_text("id,smiles\na,C\n", kSchema),
                  MissingColumn);
  CHECK_THROWS_AS(
      io::load_csv_text("id,smiles,target\na,C,1\na,CC,2\n", kSchema),
      DuplicateId);
  CHECK_THROWS_AS(io::load_csv_text("id,smiles,target\n", kSchema),
                  EmptyDataset);
  // every row rejected leaves nothing to return
  io::LoadReport report;
  CHECK_THROWS_AS(
      io::load_csv_text("id,smiles,target\na,Zz9,1\n", kSchema, &report),
      EmptyDataset);
  CHECK(report.rejects.size() == 1);

  const char *msg = "";
  try {
    io::load_csv_text("id,smiles,target\nx7,C,1\nx7,CC,2\n", kSchema);
  } catch (const DuplicateId &e) {
    msg = e.what();
  }
  CHECK(std::string(msg).find("x7") != std::string::npos);
}

TEST_CASE("csv: serialization round trip") {
  const std::string text =
      "id,smiles,target\n"
      "a,C,1.5\n"
      "b,CCO,0.1000000000000000055511151231257827\n";
  const io::Dataset ds = io::load_csv_text(text, kSchema);
  const std::string out = io::dataset_to_csv(ds, kSchema);
  const io::Dataset again = io::load_csv_text(out, kSchema);
  REQUIRE(again.size() == ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    CHECK(again.records[static_cast<std::size_t>(i)].id ==
          ds.records[static_cast<std::size_t>(i)].id);
    CHECK(again.records[static_cast<std::size_t>(i)].target ==
          ds.records[static_cast<std::size_t>(i)].target);
  }
  CHECK(again.content_hash() == ds.content_hash());
}

TEST_CASE("content hash: order-invariant, field-sensitive") {
  io::Dataset ds;
  ds.target_name = "t";
  ds.records = {{"a", "C", 1.0}, {"b", "CC", 2.0}, {"c", "CCC", 3.0}};
  const std::uint64_t h = ds.content_hash();

  io::Dataset shuffled = ds;
  std::rotate(shuffled.records.begin(), shuffled.records.begin() + 1,
              shuffled.records.end());
  CHECK(shuffled.content_hash() == h);

  io::Dataset mut = ds;
  mut.records[1].target = 2.0000001;
  CHECK(mut.content_hash() != h);
  mut = ds;
  mut.records[1].smiles = "CO";
  CHECK(mut.content_hash() != h);
  mut = ds;
  mut.records[1].id = "bb";
  CHECK(mut.content_hash() != h);
  mut = ds;
  mut.records.pop_back();
  CHECK(mut.content_hash() != h);
}

TEST_CASE("sample_subset: seeded, order-preserving, guarded") {
  io::Dataset ds;
  ds.target_name = "t";
  for (int i = 0; i < 60; ++i)
    ds.records.push_back(
        {"id" + std::to_string(i), "C", static_cast<double>(i)});

  const io::Dataset whole = io::sample_subset(ds, 60, 1);
  CHECK(whole.content_hash() == ds.content_hash());

  const io::Dataset a = io::sample_subset(ds, 20, 5);
  const io::Dataset b = io::sample_subset(ds, 20, 5);
  const io::Dataset c = io::sample_subset(ds, 20, 6);
  REQUIRE(a.size() == 20);
  CHECK(a.content_hash() == b.content_hash());
  CHECK(a.content_hash() != c.content_hash());

  // survivors keep dataset order: targets must be strictly increasing
  for (int i = 1; i < a.size(); ++i)
    CHECK(a.records[static_cast<std::size_t>(i)].target >
          a.records[static_cast<std::size_t>(i - 1)].target);

  CHECK_THROWS_AS(io::sample_subset(ds, 61, 1), SubsetTooLarge);
}

TEST_CASE("files: atomic write, fnv, 17-digit doubles") {
  TmpDir tmp;
  const std::string path = tmp.file("data.txt");
  io::atomic_write_file(path, "hello");
  CHECK(io::read_file(path) == "hello");
  io::atomic_write_file(path, "rewritten");
  CHECK(io::read_file(path) == "rewritten");
  CHECK(io::file_fnv(path) == fnv1a64("rewritten"));

  CHECK_THROWS_AS(io::read_file(tmp.file("absent.txt")), IoFailure);

  for (double v: {0.1, 1.0 / 3.0, -2.5e-17, 123456.789, 0.0}) {
    const std::string s = io::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

namespace {

// natoms=5 methane record; mu (property 4) = 0.001, H has a Fortran
// exponent, G ends with a bare decimal point.
const char *kMethaneXyz =
    "5\n"
    "gdb 1\t157.7	157.7	157.7	0.001	13.21	-0.38	0.12	0.5	35.36	0.044749	-40.47893	-40.476062	-0.3*^-2	-40.498597	6.469\n"
    "C\t-0.012\t1.085\t0.008\t-0.535689\n"
    "H\t0.002\t-0.006\t0.002\t0.133921\n"
    "H\t1.011\t1.463\t0.0\t0.133922\n"
    "H\t-0.54\t1.447\t-0.876\t0.133923\n"
    "H\t-0.523\t1.437\t0.906\t0.133923\n"
    "1341.307\t1341.3284\t1341.365\t1562.6731\t1562.7453\n"
    "C\tC\n"
    "InChI=1S/CH4/h1H4\tInChI=1S/CH4/h1H4\n";

}  // namespace

TEST_CASE("qm9: minimal record parses end to end") {
  const io::Qm9Record rec = io::parse_qm9_file(kMethaneXyz);
  CHECK(rec.id == "gdb_1");
  CHECK(rec.natoms == 5);
  REQUIRE(rec.properties.size() == 15);
  CHECK(rec.properties.at("A") == 157.7);
  CHECK(rec.properties.at("mu") == 0.001);
  CHECK(rec.properties.at("H") == -0.003);  // "-0.3*^-2"
  CHECK(rec.properties.at("G") == -40.498597);
  CHECK(rec.properties.at("Cv") == 6.469);
  CHECK(rec.smiles_gdb17 == "C");
  CHECK(rec.smiles_relaxed == "C");
  CHECK(rec.inchi_relaxed == "InChI=1S/CH4/h1H4");
}

TEST_CASE("qm9: trailing-dot floats and crlf are tolerated") {
  std::string text = kMethaneXyz;
  // the source data writes integers as "6." now and then
  const std::size_t pos = text.find("6.469");
  text.replace(pos, 5, "6.");
  std::string crlf;
  for (char ch: text)
    crlf += (ch == '\n') ? std::string("\r\n") : std::string(1, ch);
  const io::Qm9Record rec = io::parse_qm9_file(crlf);
  CHECK(rec.properties.at("Cv") == 6.0);
}

TEST_CASE("qm9: error taxonomy with line positions") {
  CHECK_THROWS_AS(io::parse_qm9_file(""), MalformedHeader);
  CHECK_THROWS_AS(io::parse_qm9_file("zero\n"), MalformedHeader);
  CHECK_THROWS_AS(io::parse_qm9_file("5 extra\n"), MalformedHeader);
  CHECK_THROWS_AS(io::parse_qm9_file("5\n"), MalformedHeader);

  std::string bad = kMethaneXyz;
  bad.replace(bad.find("157.7"), 5, "");  // 16 tokens on line 2
  CHECK_THROWS_AS(io::parse_qm9_file(bad), PropertyCountMismatch);

  bad = kMethaneXyz;
  bad.replace(bad.find("13.21"), 5, "13x21");
  try {
    io::parse_qm9_file(bad);
    FAIL("expected UnparseableNumber");
  } catch (const UnparseableNumber &e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);  // tag, index, then A B C mu precede alpha
  }

  bad = kMethaneXyz;
  bad.replace(bad.find("5\n"), 2, "9\n");  // claims more atom lines than exist
  CHECK_THROWS_AS(io::parse_qm9_file(bad), AtomCountMismatch);

  bad = kMethaneXyz;
  const std::string atom_line = "H\t0.002\t-0.006\t0.002\t0.133921";
  bad.replace(bad.find(atom_line), atom_line.size(), "H 0.002");
  CHECK_THROWS_AS(io::parse_qm9_file(bad), AtomCountMismatch);

  bad = kMethaneXyz;
  bad.replace(bad.find("C\tC\n"), 4, "C\n");
  CHECK_THROWS_AS(io::parse_qm9_file(bad), Qm9Malformed);

  bad = kMethaneXyz;
  bad.replace(bad.find("C\tC\n"), 4, "C\tC((\n");
  CHECK_THROWS_AS(io::parse_qm9_file(bad), ParseError);
}

TEST_CASE("qm9: directory scan collects records and rejects") {
  TmpDir tmp;
  io::atomic_write_file(tmp.file("dsgdb9nsd_000002.xyz"), kMethaneXyz);
  std::string second = kMethaneXyz;
  second.replace(second.find("gdb 1"), 5, "gdb 7");
  io::atomic_write_file(tmp.file("dsgdb9nsd_000001.xyz"), second);
  io::atomic_write_file(tmp.file("broken.xyz"), "not a record\n");
  io::atomic_write_file(tmp.file("README"), "ignored, wrong extension\n");

  const io::Qm9LoadResult res = io::load_qm9_dir(tmp.str());
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].id == "gdb_7");  // filename order, not id order
  CHECK(res.records[1].id == "gdb_1");
  REQUIRE(res.rejects.size() == 1);
  CHECK(res.rejects[0].file == "broken.xyz");

  CHECK_THROWS_AS(io::load_qm9_dir(tmp.file("no_such_dir")), IoFailure);
}

namespace {

io::DklCheckpoint toy_dkl_checkpoint() {
  num::Rng rng(3);
  num::Matrix x(10, 4);
  for (num::Index i = 0; i < 10; ++i)
    for (num::Index j = 0; j < 4; ++j)
      x(i, j) = num::normal(rng);
  num::Vector y(10);
  for (num::Index i = 0; i < 10; ++i)
    y(i) = x(i, 0) + 0.2 * x(i, 2);

  io::DklCheckpoint c;
  c.config.hidden = {5};
  c.config.epochs = 15;
  c.model = gp::train_dkl(x, y, c.config).model;
  c.alphabet = selfies::build_alphabet({{"[C]", "[O]"}, {"[C]", "[=C]"}});
  c.max_len = 4;
  c.target_name = "toy";
  c.dataset_hash = 0xdeadbeefcafef00dULL;
  return c;
}

}  // namespace

TEST_CASE("checkpoint: dkl round trip is prediction-exact and byte-stable") {
  TmpDir tmp;
  const io::DklCheckpoint c = toy_dkl_checkpoint();
  const std::string path = tmp.file("model.ckpt");
  io::write_checkpoint(c, path);

  CHECK(io::checkpoint_model_type(path) == "dkl");
  const io::DklCheckpoint back = io::read_dkl_checkpoint(path);
  CHECK(back.max_len == 4);
  CHECK(back.target_name == "toy");
  CHECK(back.dataset_hash == c.dataset_hash);
  CHECK(back.alphabet.tokens == c.alphabet.tokens);
  CHECK(back.config.hidden == c.config.hidden);
  CHECK(back.model.jitter == c.model.jitter);

  num::Rng rng(11);
  num::Matrix xq(10, 4);
  for (num::Index i = 0; i < 10; ++i)
    for (num::Index j = 0; j < 4; ++j)
      xq(i, j) = num::normal(rng);
  const gp::Posterior before = gp::predict(c.model, xq);
  const gp::Posterior after = gp::predict(back.model, xq);
  for (int q = 0; q < 10; ++q) {
    CHECK(before.mean(q) == after.mean(q));
    CHECK(before.std(q) == after.std(q));
  }

  // reserializing the reread model reproduces the file byte for byte
  const std::string path2 = tmp.file("model2.ckpt");
  io::write_checkpoint(back, path2);
  CHECK(io::read_file(path) == io::read_file(path2));
}

TEST_CASE("checkpoint: damage is loud") {
  TmpDir tmp;
  const io::DklCheckpoint c = toy_dkl_checkpoint();
  const std::string path = tmp.file("model.ckpt");
  io::write_checkpoint(c, path);
  const std::string good = io::read_file(path);

  io::atomic_write_file(path, good.substr(0, good.size() / 2));
  CHECK_THROWS_AS(io::read_dkl_checkpoint(path), CorruptFile);

  std::string bumped = good;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 2");
  io::atomic_write_file(path, bumped);
  CHECK_THROWS_AS(io::read_dkl_checkpoint(path), VersionMismatch);

  std::string tampered = good;
  const std::size_t where = tampered.find("\"max_len\": 4");
  REQUIRE(where != std::string::npos);
  tampered.replace(where, 12, "\"max_len\": 9");
  io::atomic_write_file(path, tampered);
  CHECK_THROWS_AS(io::read_dkl_checkpoint(path), CorruptFile);

  io::write_checkpoint(c, path);
  CHECK_THROWS_AS(io::read_vae_checkpoint(path), ArtifactMismatch);
  CHECK_THROWS_AS(io::read_dkl_checkpoint(tmp.file("nope.ckpt")), IoFailure);
}

TEST_CASE("checkpoint: vae round trip") {
  TmpDir tmp;
  io::VaeCheckpoint c;
  c.config.hidden = {6};
  c.config.epochs = 3;
  c.config.seed = 2;
  c.max_len = 3;
  num::Rng rng(c.config.seed);
  c.params = vae::make_vae(3, 4, c.config, rng);
  c.alphabet = selfies::build_alphabet({{"[C]", "[O]", "[N]"}});
  c.dataset_hash = 42;

  const std::string path = tmp.file("vae.ckpt");
  io::write_checkpoint(c, path);
  CHECK(io::checkpoint_model_type(path) == "vae");
  const io::VaeCheckpoint back = io::read_vae_checkpoint(path);

  CHECK(back.params.latent_dim == c.params.latent_dim);
  CHECK(back.params.max_len == 3);
  CHECK(back.params.alphabet_size == 4);
  CHECK(back.alphabet.tokens == c.alphabet.tokens);

  std::vector<double> pa, pb;
  c.params.encoder.pack(pa);
  back.params.encoder.pack(pb);
  CHECK(pa == pb);
  pa.clear();
  pb.clear();
  c.params.decoder.pack(pa);
  back.params.decoder.pack(pb);
  CHECK(pa == pb);
}
