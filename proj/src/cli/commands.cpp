//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "moldkl/active/loop.hpp"
#include "moldkl/chem/descriptors.hpp"
#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"
#include "moldkl/gp/dkl.hpp"
#include "moldkl/hash.hpp"
#include "moldkl/io/checkpoint.hpp"
#include "moldkl/io/dataset.hpp"
#include "moldkl/io/files.hpp"
#include "moldkl/io/qm9.hpp"
#include "moldkl/selfies/selfies.hpp"
#include "moldkl/sim/similarity.hpp"
#include "moldkl/vae/vae.hpp"
#include "moldkl/version.hpp"

namespace moldkl::cli {

namespace {

using nlohmann::json;

// Flag errors that should exit with the usage code.
struct UsageError {
  std::string msg;
};

int exit_code_for(const Error &e) {
  if (dynamic_cast<const NumericalFailure *>(&e) ||
      dynamic_cast<const NotPositiveDefinite *>(&e) ||
      dynamic_cast<const DegenerateTargets *>(&e))
    return kExitNumericalFailure;
  if (dynamic_cast<const AnchorNotFound *>(&e) ||
      dynamic_cast<const KTooLarge *>(&e) ||
      dynamic_cast<const UnknownToken *>(&e) ||
      dynamic_cast<const InsufficientData *>(&e) ||
      dynamic_cast<const ConstantInput *>(&e))
    return kExitLookupFailure;
  if (dynamic_cast<const VersionMismatch *>(&e) ||
      dynamic_cast<const CorruptFile *>(&e) ||
      dynamic_cast<const ArtifactMismatch *>(&e) ||
      dynamic_cast<const ShapeMismatch *>(&e) ||
      dynamic_cast<const WidthMismatch *>(&e) ||
      dynamic_cast<const LengthMismatch *>(&e) ||
      dynamic_cast<const LatentDimUnsupported *>(&e))
    return kExitArtifactMismatch;
  // parse errors, load rejects, io trouble, malformed source data
  return kExitDataRejection;
}

class PhaseTimer {
 public:
  void start(const std::string &phase) {
    stop();
    phase_ = phase;
    begin_ = std::chrono::steady_clock::now();
  }
  void stop() {
    if (phase_.empty())
      return;
    const auto end = std::chrono::steady_clock::now();
    ms_[phase_] +=
        std::chrono::duration<double, std::milli>(end - begin_).count();
    phase_.clear();
  }
  json to_json() {
    stop();
    json j;
    for (const auto &[k, v]: ms_)
      j[k] = v;
    return j;
  }

 private:
  std::map<std::string, double> ms_;
  std::string phase_;
  std::chrono::steady_clock::time_point begin_;
};

struct Corpus {
  io::Dataset ds;
  std::vector<selfies::TokenSequence> seqs;  // aligned with ds.records
  std::vector<std::string> skip_notes;
};

// Loads the CSV and SELFIES-encodes every molecule. Any rejected or
// unencodable row is fatal unless allow_skip, in which case it is dropped
// and noted.
Corpus load_corpus(const std::string &path, const io::CsvSchema &schema,
                   bool allow_skip) {
  if (path.empty())
    throw UsageError{"--data is required"};
  Corpus c;
  io::LoadReport report;
  c.ds = io::load_csv(path, schema, &report);
  for (const io::RowReject &r: report.rejects)
    c.skip_notes.push_back("line " + std::to_string(r.line) + " (id '" +
                           r.id + "'): " + r.reason);

  std::vector<io::DataRecord> kept;
  for (const io::DataRecord &rec: c.ds.records) {
    try {
      c.seqs.push_back(
          selfies::encode_selfies(chem::parse_smiles(rec.smiles)));
      kept.push_back(rec);
    } catch (const Error &e) {
      c.skip_notes.push_back("id '" + rec.id + "': " +
                             std::string(e.what()));
    }
  }
  c.ds.records = std::move(kept);

  if (!c.skip_notes.empty()) {
    for (const std::string &note: c.skip_notes)
      std::cerr << "moldkl: skipped " << note << "\n";
    if (!allow_skip)
      throw EmptyDataset(std::to_string(c.skip_notes.size()) +
                         " rejected rows (rerun with --allow-skip to drop "
                         "them)");
  }
  if (c.ds.records.empty())
    throw EmptyDataset("no usable rows in " + path);
  return c;
}

int corpus_max_len(const std::vector<selfies::TokenSequence> &seqs) {
  std::size_t m = 0;
  for (const selfies::TokenSequence &s: seqs)
    m = std::max(m, s.size());
  return static_cast<int>(m);
}

// Sidecar format: alphabet text plus a "# max_len: N" comment.
std::string alphabet_sidecar(const selfies::Alphabet &a, int max_len) {
  return "# moldkl alphabet\n# version: 1\n# max_len: " +
         std::to_string(max_len) + "\n" +
         [&] {
           std::string lines;
           for (const std::string &t: a.tokens)
             lines += t + "\n";
           return lines;
         }();
}

int sidecar_max_len(const std::string &text) {
  const std::string key = "# max_len: ";
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos)
      end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind(key, 0) == 0)
      return std::stoi(line.substr(key.size()));
    pos = end + 1;
  }
  throw CorruptFile("alphabet sidecar lacks a max_len comment");
}

// Throws AlphabetMismatch unless every sequence fits the given alphabet
// and max_len.
void check_featurization(const std::vector<selfies::TokenSequence> &seqs,
                         const selfies::Alphabet &a, int max_len) {
  for (const selfies::TokenSequence &s: seqs) {
    if (static_cast<int>(s.size()) > max_len)
      throw AlphabetMismatch("sequence of " + std::to_string(s.size()) +
                             " tokens exceeds the checkpoint max_len " +
                             std::to_string(max_len));
    for (const std::string &t: s)
      try {
        a.index_of(t);
      } catch (const UnknownToken &) {
        throw AlphabetMismatch("token '" + t +
                               "' is absent from the checkpoint alphabet");
      }
  }
}

num::Vector targets_of(const io::Dataset &ds) {
  num::Vector y(static_cast<num::Index>(ds.records.size()));
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    y(static_cast<num::Index>(i)) = ds.records[i].target;
  return y;
}

std::string out_path(const std::string &dir, const std::string &name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoFailure("cannot create " + dir + ": " + ec.message());
}

void write_manifest(const std::string &dir, const std::string &subcommand,
                    json config, const std::string &objective,
                    std::uint64_t dataset_hash,
                    const std::vector<std::string> &outputs,
                    const std::vector<std::string> &notes,
                    PhaseTimer &timer, json extra = json::object()) {
  json m;
  m["tool_version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = std::move(config);
  m["objective"] = objective;
  m["dataset_hash"] = hash_hex(dataset_hash);
  json out;
  for (const std::string &path: outputs)
    out[std::filesystem::path(path).filename().string()] =
        hash_hex(io::file_fnv(path));
  m["outputs"] = std::move(out);
  m["notes"] = notes;
  m["report"] = std::move(extra);
  m["timings_ms"] = timer.to_json();
  io::atomic_write_file(out_path(dir, "manifest.json"), m.dump(2) + "\n");
}

std::string latent_map_csv(const io::Dataset &ds, const num::Matrix &z) {
  std::string out = "id,smiles,z1,z2\n";
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const num::Index r = static_cast<num::Index>(i);
    out += ds.records[i].id + "," + ds.records[i].smiles + "," +
           io::format_double(z(r, 0)) + "," + io::format_double(z(r, 1)) +
           "\n";
  }
  return out;
}

// ---- subcommand option bags -------------------------------------------------

struct CommonData {
  std::string data;
  std::string out = "out";
  std::string id_col = "id";
  std::string smiles_col = "smiles";
  std::string target_col = "target";
  bool allow_skip = false;

  io::CsvSchema schema() const { return {id_col, smiles_col, target_col}; }
  json to_json() const {
    return {{"data", data},         {"out", out},
            {"id_col", id_col},     {"smiles_col", smiles_col},
            {"target_col", target_col}, {"allow_skip", allow_skip}};
  }
};

void add_common(CLI::App *sub, CommonData &o) {
  sub->add_option("--data", o.data, "input dataset CSV")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory")
      ->capture_default_str();
  sub->add_option("--id-col", o.id_col, "id column name")
      ->capture_default_str();
  sub->add_option("--smiles-col", o.smiles_col, "SMILES column name")
      ->capture_default_str();
  // every corpus-loading subcommand takes --target: the column is part of
  // the record schema even where the command ignores the values
  sub->add_option("--target", o.target_col, "target column name")
      ->capture_default_str();
  sub->add_flag("--allow-skip", o.allow_skip,
                "drop rejected rows instead of failing");
  sub->add_option("--config")->description("key=value config file");
}

// Fills options a flat key=value file names unless the flag was already
// given on the command line, so flags > config > defaults. Returns an
// error message for unknown keys.
std::string apply_config(CLI::App *sub, const std::string &path) {
  const std::string text = io::read_file(path);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos)
      end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#')
      continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      return path + ":" + std::to_string(line_no) + ": expected key=value";
    auto trim = [](std::string s) {
      const std::size_t b = s.find_first_not_of(" \t");
      const std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config")
      continue;
    CLI::Option *op = sub->get_option_no_throw("--" + key);
    if (op == nullptr)
      return path + ":" + std::to_string(line_no) + ": unknown key '" +
             key + "'";
    if (op->count() == 0) {
      op->add_result(value);
      op->run_callback();
    }
  }
  return {};
}

struct DklOpts {
  int latent_dim = 2;
  std::vector<num::Index> hidden = {128, 32};
  int epochs = 500;
  double lr = 5e-3;
  std::uint64_t seed = 0;
  double init_log_lengthscale = 0.0;
  double init_log_outputscale = 0.0;
  double init_log_noise = std::log(0.01);

  gp::DklConfig config() const {
    gp::DklConfig c;
    c.latent_dim = latent_dim;
    c.hidden = hidden;
    c.epochs = epochs;
    c.lr = lr;
    c.seed = seed;
    c.init_log_lengthscale = init_log_lengthscale;
    c.init_log_outputscale = init_log_outputscale;
    c.init_log_noise = init_log_noise;
    return c;
  }
  json to_json() const {
    return {{"latent_dim", latent_dim},
            {"hidden", hidden},
            {"epochs", epochs},
            {"lr", lr},
            {"seed", seed},
            {"init_log_lengthscale", init_log_lengthscale},
            {"init_log_outputscale", init_log_outputscale},
            {"init_log_noise", init_log_noise}};
  }
};

void add_dkl(CLI::App *sub, DklOpts &o, const std::string &seed_flag) {
  sub->add_option("--latent-dim", o.latent_dim, "latent dimensions")
      ->capture_default_str();
  sub->add_option("--hidden", o.hidden, "hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--epochs", o.epochs, "training epochs")
      ->capture_default_str();
  sub->add_option("--lr", o.lr, "Adam learning rate")
      ->capture_default_str();
  sub->add_option(seed_flag, o.seed, "weight init seed")
      ->capture_default_str();
  sub->add_option("--init-log-lengthscale", o.init_log_lengthscale,
                  "initial log lengthscale")
      ->capture_default_str();
  sub->add_option("--init-log-outputscale", o.init_log_outputscale,
                  "initial log outputscale")
      ->capture_default_str();
  sub->add_option("--init-log-noise", o.init_log_noise,
                  "initial log noise variance")
      ->capture_default_str();
}

// ---- featurize ----------------------------------------------------------------

int cmd_featurize(const CommonData &o) {
  PhaseTimer timer;
  timer.start("load");
  const Corpus c = load_corpus(o.data, o.schema(), o.allow_skip);

  timer.start("featurize");
  std::string desc = "id,smiles";
  for (const char *name: chem::kDescriptorNames)
    desc += std::string(",") + name;
  desc += '\n';
  for (const io::DataRecord &rec: c.ds.records) {
    const chem::DescriptorVector d =
        chem::descriptors(chem::parse_smiles(rec.smiles));
    desc += rec.id + "," + rec.smiles + "," + io::format_double(d.mw) +
            "," + std::to_string(d.ringct) + "," + std::to_string(d.rotb) +
            "," + std::to_string(d.hbd) + "," + std::to_string(d.hba) +
            "," + io::format_double(d.tpsa) + "," +
            io::format_double(d.mologp) + "\n";
  }
  const selfies::Alphabet alphabet = selfies::build_alphabet(c.seqs);
  const int max_len = corpus_max_len(c.seqs);

  timer.start("write");
  ensure_out_dir(o.out);
  const std::string desc_path = out_path(o.out, "descriptors.csv");
  const std::string alpha_path = out_path(o.out, "alphabet.txt");
  io::atomic_write_file(desc_path, desc);
  io::atomic_write_file(alpha_path, alphabet_sidecar(alphabet, max_len));
  write_manifest(o.out, "featurize", o.to_json(), "", c.ds.content_hash(),
                 {desc_path, alpha_path}, c.skip_notes, timer);
  return kExitOk;
}

// ---- train-dkl ------------------------------------------------------------------

struct TrainDklOpts {
  CommonData common;
  DklOpts dkl;
  std::string alphabet_file;
  int grid_res = 50;
};

int cmd_train_dkl(const TrainDklOpts &o) {
  PhaseTimer timer;
  timer.start("load");
  const Corpus c =
      load_corpus(o.common.data, o.common.schema(), o.common.allow_skip);

  selfies::Alphabet alphabet;
  int max_len = 0;
  if (o.alphabet_file.empty()) {
    alphabet = selfies::build_alphabet(c.seqs);
    max_len = corpus_max_len(c.seqs);
  } else {
    const std::string text = io::read_file(o.alphabet_file);
    alphabet = selfies::alphabet_from_text(text);
    max_len = sidecar_max_len(text);
    check_featurization(c.seqs, alphabet, max_len);
  }
  const num::Matrix x = selfies::one_hot_batch(c.seqs, alphabet, max_len);
  const num::Vector y = targets_of(c.ds);

  timer.start("train");
  const gp::DklConfig cfg = o.dkl.config();
  const gp::TrainResult tr = gp::train_dkl(x, y, cfg);

  timer.start("predict");
  const num::Matrix z = gp::embed(tr.model.params, x);
  const gp::Posterior post = gp::batch_predict(tr.model, x);
  const gp::LatentGrid grid = gp::latent_grid_predict(tr.model, o.grid_res);

  timer.start("write");
  ensure_out_dir(o.common.out);

  std::string latent = "id,smiles,z1,z2,target,pred_mean,pred_std\n";
  for (std::size_t i = 0; i < c.ds.records.size(); ++i) {
    const num::Index r = static_cast<num::Index>(i);
    latent += c.ds.records[i].id + "," + c.ds.records[i].smiles + "," +
              io::format_double(z(r, 0)) + "," + io::format_double(z(r, 1)) +
              "," + io::format_double(y(r)) + "," +
              io::format_double(post.mean(r)) + "," +
              io::format_double(post.std(r)) + "\n";
  }

  std::string loss = "epoch,nll\n";
  for (std::size_t e = 0; e < tr.loss_curve.size(); ++e)
    loss += std::to_string(e) + "," + io::format_double(tr.loss_curve[e]) +
            "\n";

  std::string grid_csv = "z1,z2,pred_mean,pred_std\n";
  for (num::Index i = 0; i < grid.z1.size(); ++i)
    for (num::Index j = 0; j < grid.z2.size(); ++j)
      grid_csv += io::format_double(grid.z1(i)) + "," +
                  io::format_double(grid.z2(j)) + "," +
                  io::format_double(grid.mean(i, j)) + "," +
                  io::format_double(grid.std(i, j)) + "\n";

  io::DklCheckpoint ckpt{cfg,      tr.model,
                         alphabet, max_len,
                         o.common.target_col, c.ds.content_hash()};
  const std::string ckpt_path = out_path(o.common.out, "checkpoint.json");
  const std::string latent_path = out_path(o.common.out, "latent.csv");
  const std::string loss_path = out_path(o.common.out, "loss_curve.csv");
  const std::string grid_path = out_path(o.common.out, "grid.csv");
  io::write_checkpoint(ckpt, ckpt_path);
  io::atomic_write_file(latent_path, latent);
  io::atomic_write_file(loss_path, loss);
  io::atomic_write_file(grid_path, grid_csv);

  json config = o.common.to_json();
  config["dkl"] = o.dkl.to_json();
  config["alphabet_file"] = o.alphabet_file;
  config["grid_res"] = o.grid_res;
  json report;
  report["final_nll"] = tr.loss_curve.back();
  report["initial_nll"] = tr.loss_curve.front();
  write_manifest(o.common.out, "train-dkl", config, o.common.target_col,
                 c.ds.content_hash(),
                 {ckpt_path, latent_path, loss_path, grid_path},
                 c.skip_notes, timer, report);
  return kExitOk;
}

// ---- train-vae ------------------------------------------------------------------

struct TrainVaeOpts {
  CommonData common;
  vae::VaeConfig cfg;
};

int cmd_train_vae(const TrainVaeOpts &o) {
  PhaseTimer timer;
  timer.start("load");
  const Corpus c =
      load_corpus(o.common.data, o.common.schema(), o.common.allow_skip);
  const selfies::Alphabet alphabet = selfies::build_alphabet(c.seqs);
  const int max_len = corpus_max_len(c.seqs);
  const num::Matrix x = selfies::one_hot_batch(c.seqs, alphabet, max_len);

  timer.start("train");
  const vae::TrainVaeResult tr =
      vae::train_vae(x, max_len, alphabet.size(), o.cfg);

  timer.start("predict");
  const num::Matrix z = vae::vae_latent_map(tr.params, x);
  const double accuracy = vae::reconstruction_accuracy(tr.params, x);
  const double baseline = vae::majority_baseline(x, alphabet.size());

  timer.start("write");
  ensure_out_dir(o.common.out);
  std::string curve = "epoch,loss,reconstruction_nll,kl\n";
  for (std::size_t e = 0; e < tr.loss_curve.size(); ++e)
    curve += std::to_string(e) + "," + io::format_double(tr.loss_curve[e]) +
             "," + io::format_double(tr.recon_curve[e]) + "," +
             io::format_double(tr.kl_curve[e]) + "\n";

  io::VaeCheckpoint ckpt{o.cfg, tr.params, alphabet, max_len,
                         c.ds.content_hash()};
  const std::string ckpt_path = out_path(o.common.out, "checkpoint.json");
  const std::string latent_path = out_path(o.common.out, "latent.csv");
  const std::string curve_path = out_path(o.common.out, "elbo_curve.csv");
  io::write_checkpoint(ckpt, ckpt_path);
  io::atomic_write_file(latent_path, latent_map_csv(c.ds, z));
  io::atomic_write_file(curve_path, curve);

  json config = o.common.to_json();
  config["vae"] = {{"latent_dim", o.cfg.latent_dim},
                   {"hidden", o.cfg.hidden},
                   {"epochs", o.cfg.epochs},
                   {"lr", o.cfg.lr},
                   {"seed", o.cfg.seed}};
  json report;
  report["reconstruction_accuracy"] = accuracy;
  report["majority_baseline"] = baseline;
  report["final_loss"] = tr.loss_curve.back();
  report["initial_loss"] = tr.loss_curve.front();
  write_manifest(o.common.out, "train-vae", config, "elbo",
                 c.ds.content_hash(), {ckpt_path, latent_path, curve_path},
                 c.skip_notes, timer, report);
  return kExitOk;
}

// ---- active ---------------------------------------------------------------------

struct ActiveOpts {
  CommonData common;
  DklOpts dkl;
  std::string reference;
  int n_init = 100;
  std::string mode = "maximize";
  int acq_batch = 1;
  int predict_batch = 250;
  int retrain_every = 1;
  int budget = -1;
  std::uint64_t seed = 0;
  double beta = 1.0;
  bool cold_start = false;
  int refine_epochs = 50;
  int latent_every = 0;
  bool with_baseline = false;
};

int cmd_active(const ActiveOpts &o) {
  if (o.reference.empty())
    throw UsageError{"--reference is required"};
  PhaseTimer timer;
  timer.start("load");
  const Corpus c =
      load_corpus(o.common.data, o.common.schema(), o.common.allow_skip);
  const io::DklCheckpoint ref = io::read_dkl_checkpoint(o.reference);
  check_featurization(c.seqs, ref.alphabet, ref.max_len);

  active::Problem p;
  p.x = selfies::one_hot_batch(c.seqs, ref.alphabet, ref.max_len);
  p.y = targets_of(c.ds);
  for (const io::DataRecord &rec: c.ds.records) {
    p.ids.push_back(rec.id);
    p.smiles.push_back(rec.smiles);
  }

  active::RunConfig cfg;
  cfg.n_init = o.n_init;
  cfg.acquisition_mode = o.mode == "minimize" ? active::Mode::kMinimize
                                              : active::Mode::kMaximize;
  cfg.acq_batch = o.acq_batch;
  cfg.predict_batch = o.predict_batch;
  cfg.retrain_every = o.retrain_every;
  cfg.step_budget = o.budget;
  cfg.seed = o.seed;
  cfg.beta = o.beta;
  cfg.cold_start = o.cold_start;
  cfg.refine_epochs = o.refine_epochs;
  cfg.latent_log_every = o.latent_every;
  cfg.dkl = o.dkl.config();

  timer.start("run");
  const active::RunResult res = active::run(p, cfg, &ref.model);

  timer.start("write");
  ensure_out_dir(o.common.out);
  std::vector<std::string> outputs;

  const std::string traj_path = out_path(o.common.out, "trajectory.csv");
  io::atomic_write_file(traj_path,
                        active::trajectory_to_csv(res.trajectory, p));
  outputs.push_back(traj_path);

  std::string rmse = "cycle,rmse_unmeasured\n";
  for (const active::TrajectoryRecord &rec: res.trajectory)
    rmse += std::to_string(rec.cycle) + "," +
            io::format_double(rec.rmse_unmeasured) + "\n";
  const std::string rmse_path = out_path(o.common.out, "rmse_curve.csv");
  io::atomic_write_file(rmse_path, rmse);
  outputs.push_back(rmse_path);

  const std::string latent_path =
      out_path(o.common.out, "latent_final.csv");
  io::atomic_write_file(
      latent_path,
      latent_map_csv(c.ds, gp::embed(res.state.model.params, p.x)));
  outputs.push_back(latent_path);

  for (const auto &[cycle, z]: res.latent_snapshots) {
    const std::string path = out_path(
        o.common.out, "latent_cycle_" + std::to_string(cycle) + ".csv");
    io::atomic_write_file(path, latent_map_csv(c.ds, z));
    outputs.push_back(path);
  }

  json report;
  try {
    const active::ReferenceComparison cmp =
        active::compare_to_reference(res.trajectory);
    report["pearson_mean_vs_reference"] = cmp.pearson_mean;
    report["pearson_std_vs_reference"] = cmp.pearson_std;
  } catch (const Error &e) {
    report["reference_comparison_skipped"] = e.what();
  }
  report["final_rmse"] = res.trajectory.empty()
                             ? 0.0
                             : res.trajectory.back().rmse_unmeasured;

  if (o.with_baseline) {
    timer.start("baseline");
    const active::RunResult base = active::random_baseline(p, cfg, nullptr);
    timer.start("write");
    const std::string base_path =
        out_path(o.common.out, "trajectory_baseline.csv");
    io::atomic_write_file(base_path,
                          active::trajectory_to_csv(base.trajectory, p));
    outputs.push_back(base_path);
    report["final_rmse_baseline"] =
        base.trajectory.empty() ? 0.0
                                : base.trajectory.back().rmse_unmeasured;
  }

  json config = o.common.to_json();
  config["reference"] = o.reference;
  config["n_init"] = o.n_init;
  config["mode"] = o.mode;
  config["acq_batch"] = o.acq_batch;
  config["predict_batch"] = o.predict_batch;
  config["retrain_every"] = o.retrain_every;
  config["budget"] = o.budget;
  config["seed"] = o.seed;
  config["beta"] = o.beta;
  config["cold_start"] = o.cold_start;
  config["refine_epochs"] = o.refine_epochs;
  config["latent_every"] = o.latent_every;
  config["with_baseline"] = o.with_baseline;
  config["dkl"] = o.dkl.to_json();
  write_manifest(
      o.common.out, "active", config, o.common.target_col,
      c.ds.content_hash(), outputs,
      {"model is trained on measured points and evaluated on unmeasured "
       "points",
       "reference predictions are logged only, never used for acquisition"},
      timer, report);
  return kExitOk;
}

// ---- similar --------------------------------------------------------------------

struct SimilarOpts {
  CommonData common;
  std::string checkpoint;
  std::string anchor;
  int k = 5;
  bool matrix = false;
  std::vector<std::string> matrix_ids;
  int fp_radius = 2;
  int fp_bits = 2048;
};

int cmd_similar(const SimilarOpts &o) {
  PhaseTimer timer;
  timer.start("load");
  const Corpus c =
      load_corpus(o.common.data, o.common.schema(), o.common.allow_skip);
  ensure_out_dir(o.common.out);
  std::vector<std::string> outputs;
  json report;

  if (!o.anchor.empty()) {
    if (o.checkpoint.empty())
      throw ArtifactMismatch("neighbor mode needs --checkpoint for the "
                             "latent space");
    const io::DklCheckpoint ckpt = io::read_dkl_checkpoint(o.checkpoint);
    check_featurization(c.seqs, ckpt.alphabet, ckpt.max_len);
    const num::Matrix x =
        selfies::one_hot_batch(c.seqs, ckpt.alphabet, ckpt.max_len);
    std::vector<std::string> ids;
    for (const io::DataRecord &rec: c.ds.records)
      ids.push_back(rec.id);

    timer.start("predict");
    const std::vector<std::string> neigh =
        sim::latent_neighbors(ckpt.model, x, ids, o.anchor, o.k);

    const num::Matrix z = gp::embed(ckpt.model.params, x);
    const num::Index anchor_row = static_cast<num::Index>(
        std::find(ids.begin(), ids.end(), o.anchor) - ids.begin());
    std::vector<bool> used(ids.size(), false);
    used[static_cast<std::size_t>(anchor_row)] = true;

    timer.start("write");
    std::string csv = "rank,id,smiles,distance\n";
    for (std::size_t rank = 0; rank < neigh.size(); ++rank) {
      // Duplicate ids are resolved to the closest unused row.
      std::size_t best = ids.size();
      double best_d = 0.0;
      for (std::size_t r = 0; r < ids.size(); ++r) {
        if (used[r] || ids[r] != neigh[rank])
          continue;
        const double d =
            (z.row(static_cast<num::Index>(r)) - z.row(anchor_row)).norm();
        if (best == ids.size() || d < best_d) {
          best = r;
          best_d = d;
        }
      }
      used[best] = true;
      csv += std::to_string(rank + 1) + "," + neigh[rank] + "," +
             c.ds.records[best].smiles + "," + io::format_double(best_d) +
             "\n";
    }
    const std::string path = out_path(o.common.out, "neighbors.csv");
    io::atomic_write_file(path, csv);
    outputs.push_back(path);
    report["anchor"] = o.anchor;
    report["k"] = o.k;
  }

  if (o.matrix) {
    timer.start("featurize");
    std::vector<chem::MolGraph> mols;
    std::vector<std::string> ids;
    if (o.matrix_ids.empty()) {
      for (const io::DataRecord &rec: c.ds.records) {
        mols.push_back(chem::parse_smiles(rec.smiles));
        ids.push_back(rec.id);
      }
    } else {
      for (const std::string &want: o.matrix_ids) {
        const auto it = std::find_if(
            c.ds.records.begin(), c.ds.records.end(),
            [&](const io::DataRecord &r) { return r.id == want; });
        if (it == c.ds.records.end())
          throw AnchorNotFound("no molecule with id '" + want + "'");
        mols.push_back(chem::parse_smiles(it->smiles));
        ids.push_back(it->id);
      }
    }
    const sim::SimilarityMatrix sm =
        sim::similarity_matrix(mols, ids, o.fp_radius, o.fp_bits);

    timer.start("write");
    std::string csv = "id";
    for (const std::string &id: sm.ids)
      csv += "," + id;
    csv += '\n';
    for (num::Index i = 0; i < sm.values.rows(); ++i) {
      csv += sm.ids[static_cast<std::size_t>(i)];
      for (num::Index j = 0; j < sm.values.cols(); ++j)
        csv += "," + io::format_double(sm.values(i, j));
      csv += '\n';
    }
    const std::string path = out_path(o.common.out, "similarity.csv");
    io::atomic_write_file(path, csv);
    outputs.push_back(path);
    report["matrix_size"] = sm.ids.size();
  }

  if (outputs.empty())
    throw ArtifactMismatch("nothing to do: give --anchor and/or --matrix");

  json config = o.common.to_json();
  config["checkpoint"] = o.checkpoint;
  config["anchor"] = o.anchor;
  config["k"] = o.k;
  config["matrix"] = o.matrix;
  config["matrix_ids"] = o.matrix_ids;
  config["fp_radius"] = o.fp_radius;
  config["fp_bits"] = o.fp_bits;
  write_manifest(o.common.out, "similar", config, "", c.ds.content_hash(),
                 outputs, c.skip_notes, timer, report);
  return kExitOk;
}

// ---- ingest-qm9 -----------------------------------------------------------------

struct IngestOpts {
  std::string dir;
  std::string out = "out";
  std::string property = "mu";
  int limit = 0;  // 0 = all
};

int cmd_ingest_qm9(const IngestOpts &o) {
  if (o.dir.empty())
    throw UsageError{"--dir is required"};
  PhaseTimer timer;
  timer.start("load");
  io::Qm9LoadResult loaded = io::load_qm9_dir(o.dir);
  if (o.limit > 0 &&
      static_cast<int>(loaded.records.size()) > o.limit)
    loaded.records.resize(static_cast<std::size_t>(o.limit));

  io::Dataset ds;
  ds.target_name = o.property;
  for (const io::Qm9Record &rec: loaded.records)
    ds.records.push_back(
        {rec.id, rec.smiles_relaxed, rec.properties.at(o.property)});
  if (ds.records.empty())
    throw EmptyDataset("no parseable records under " + o.dir);

  timer.start("write");
  ensure_out_dir(o.out);
  const std::string csv_path = out_path(o.out, "dataset.csv");
  io::atomic_write_file(
      csv_path, io::dataset_to_csv(ds, {"id", "smiles", o.property}));

  std::vector<std::string> notes;
  for (const io::Qm9FileReject &r: loaded.rejects)
    notes.push_back(r.file + ": " + r.reason);
  json config = {{"dir", o.dir},
                 {"out", o.out},
                 {"property", o.property},
                 {"limit", o.limit}};
  json report;
  report["records"] = ds.records.size();
  report["rejects"] = loaded.rejects.size();
  write_manifest(o.out, "ingest-qm9", config, o.property,
                 ds.content_hash(), {csv_path}, notes, timer, report);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv) {
  CLI::App app{"molecular deep kernel learning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("moldkl ") + kVersion);

  CommonData feat_opts;
  CLI::App *feat = app.add_subcommand(
      "featurize", "compute descriptors and the token alphabet");
  add_common(feat, feat_opts);

  TrainDklOpts dkl_opts;
  CLI::App *tdkl = app.add_subcommand(
      "train-dkl", "train the deep kernel model on a target column");
  add_common(tdkl, dkl_opts.common);
  add_dkl(tdkl, dkl_opts.dkl, "--seed");
  tdkl->add_option("--alphabet", dkl_opts.alphabet_file,
                   "alphabet sidecar from featurize (default: derive from "
                   "the corpus)");
  tdkl->add_option("--grid-res", dkl_opts.grid_res,
                   "latent grid resolution")
      ->capture_default_str();

  TrainVaeOpts vae_opts;
  CLI::App *tvae =
      app.add_subcommand("train-vae", "train the VAE baseline");
  add_common(tvae, vae_opts.common);
  tvae->add_option("--latent-dim", vae_opts.cfg.latent_dim,
                   "latent dimensions")
      ->capture_default_str();
  tvae->add_option("--hidden", vae_opts.cfg.hidden, "hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
  tvae->add_option("--epochs", vae_opts.cfg.epochs, "training epochs")
      ->capture_default_str();
  tvae->add_option("--lr", vae_opts.cfg.lr, "Adam learning rate")
      ->capture_default_str();
  tvae->add_option("--seed", vae_opts.cfg.seed, "weight/sampling seed")
      ->capture_default_str();

  ActiveOpts act_opts;
  CLI::App *act = app.add_subcommand(
      "active", "run the active-learning loop against a reference model");
  add_common(act, act_opts.common);
  add_dkl(act, act_opts.dkl, "--model-seed");
  act->add_option("--reference", act_opts.reference,
                  "reference DKL checkpoint")
      ->check(CLI::ExistingFile);
  act->add_option("--n-init", act_opts.n_init, "seed set size")
      ->capture_default_str();
  act->add_option("--mode", act_opts.mode, "acquisition objective")
      ->check(CLI::IsMember({"maximize", "minimize"}))
      ->capture_default_str();
  act->add_option("--acq-batch", act_opts.acq_batch,
                  "points acquired per cycle")
      ->capture_default_str();
  act->add_option("--predict-batch", act_opts.predict_batch,
                  "prediction batch size (memory only)")
      ->capture_default_str();
  act->add_option("--retrain-every", act_opts.retrain_every,
                  "cycles between retrains")
      ->capture_default_str();
  act->add_option("--budget", act_opts.budget,
                  "max cycles, negative = exhaust")
      ->capture_default_str();
  act->add_option("--seed", act_opts.seed, "run seed (init draw)")
      ->capture_default_str();
  act->add_option("--beta", act_opts.beta, "acquisition weight on std")
      ->capture_default_str();
  act->add_flag("--cold-start", act_opts.cold_start,
                "retrain from fresh weights each cycle");
  act->add_option("--refine-epochs", act_opts.refine_epochs,
                  "warm-start epochs per retrain")
      ->capture_default_str();
  act->add_option("--latent-every", act_opts.latent_every,
                  "latent snapshot interval in cycles, 0 = never")
      ->capture_default_str();
  act->add_flag("--with-baseline", act_opts.with_baseline,
                "also run the random-selection control arm");

  SimilarOpts sim_opts;
  CLI::App *siml = app.add_subcommand(
      "similar", "latent neighbors and Tanimoto similarity matrices");
  add_common(siml, sim_opts.common);
  siml->add_option("--checkpoint", sim_opts.checkpoint,
                   "DKL checkpoint for the latent space");
  siml->add_option("--anchor", sim_opts.anchor, "anchor molecule id");
  siml->add_option("-k,--k", sim_opts.k, "neighbor count")
      ->capture_default_str();
  siml->add_flag("--matrix", sim_opts.matrix, "emit a Tanimoto matrix");
  siml->add_option("--matrix-ids", sim_opts.matrix_ids,
                   "ids for the matrix (default: all)")
      ->delimiter(',');
  siml->add_option("--fp-radius", sim_opts.fp_radius, "fingerprint radius")
      ->capture_default_str();
  siml->add_option("--fp-bits", sim_opts.fp_bits, "fingerprint width")
      ->capture_default_str();

  IngestOpts ing_opts;
  CLI::App *ing = app.add_subcommand(
      "ingest-qm9", "convert a QM9 download into a dataset CSV");
  ing->add_option("--dir", ing_opts.dir, "directory of QM9 .xyz files")
      ->check(CLI::ExistingDirectory);
  ing->add_option("--out", ing_opts.out, "output directory")
      ->capture_default_str();
  ing->add_option("--property", ing_opts.property, "target property")
      ->check(CLI::IsMember(std::vector<std::string>(
          io::kQm9Properties.begin(), io::kQm9Properties.end())))
      ->capture_default_str();
  ing->add_option("--limit", ing_opts.limit,
                  "parse at most this many files, 0 = all")
      ->capture_default_str();
  ing->add_option("--config")->description("key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App *parsed = app.get_subcommands().front();
  const CLI::Option *cop = parsed->get_option_no_throw("--config");
  if (cop != nullptr && cop->count() > 0) {
    try {
      const std::string err =
          apply_config(parsed, cop->as<std::string>());
      if (!err.empty()) {
        std::cerr << "moldkl: " << err << "\n";
        return kExitUsage;
      }
    } catch (const CLI::Error &e) {
      std::cerr << "moldkl: config: " << e.what() << "\n";
      return kExitUsage;
    } catch (const Error &e) {
      std::cerr << "moldkl: config: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  try {
    if (*feat)
      return cmd_featurize(feat_opts);
    if (*tdkl)
      return cmd_train_dkl(dkl_opts);
    if (*tvae)
      return cmd_train_vae(vae_opts);
    if (*act)
      return cmd_active(act_opts);
    if (*siml)
      return cmd_similar(sim_opts);
    if (*ing)
      return cmd_ingest_qm9(ing_opts);
  } catch (const UsageError &u) {
    std::cerr << "moldkl: " << u.msg << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "moldkl: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace moldkl::cli
