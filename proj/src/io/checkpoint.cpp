//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/io/checkpoint.hpp"

#include <cstdio>

#include <json.hpp>

#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"
#include "moldkl/io/files.hpp"
#include "moldkl/version.hpp"

namespace moldkl::io {

namespace {

using nlohmann::json;

json to_json(const num::Vector &v) {
  json a = json::array();
  for (num::Index i = 0; i < v.size(); ++i)
    a.push_back(v(i));
  return a;
}

json to_json(const num::Matrix &m) {
  json rows = json::array();
  for (num::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (num::Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

num::Vector vector_from(const json &a) {
  num::Vector v(static_cast<num::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    v(static_cast<num::Index>(i)) = a[i].get<double>();
  return v;
}

num::Matrix matrix_from(const json &rows) {
  if (rows.empty())
    return num::Matrix(0, 0);
  num::Matrix m(static_cast<num::Index>(rows.size()),
                static_cast<num::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw CorruptFile("ragged matrix in checkpoint");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<num::Index>(i), static_cast<num::Index>(j)) =
          rows[i][j].get<double>();
  }
  return m;
}

const char *act_name(num::Activation a) {
  switch (a) {
  case num::Activation::kIdentity: return "identity";
  case num::Activation::kTanh: return "tanh";
  case num::Activation::kRelu: return "relu";
  }
  return "identity";
}

num::Activation act_from(const std::string &name) {
  if (name == "identity")
    return num::Activation::kIdentity;
  if (name == "tanh")
    return num::Activation::kTanh;
  if (name == "relu")
    return num::Activation::kRelu;
  throw CorruptFile("unknown activation '" + name + "'");
}

json to_json(const num::Mlp &mlp) {
  json layers = json::array();
  for (const num::Layer &l: mlp.layers)
    layers.push_back({{"weight", to_json(l.weight)},
                      {"bias", to_json(l.bias)},
                      {"act", act_name(l.act)}});
  return layers;
}

num::Mlp mlp_from(const json &layers) {
  num::Mlp mlp;
  for (const json &jl: layers) {
    num::Layer l;
    l.weight = matrix_from(jl.at("weight"));
    l.bias = vector_from(jl.at("bias"));
    l.act = act_from(jl.at("act").get<std::string>());
    mlp.layers.push_back(std::move(l));
  }
  if (mlp.layers.empty())
    throw CorruptFile("checkpoint mlp has no layers");
  return mlp;
}

json alphabet_to_json(const selfies::Alphabet &a) {
  json t = json::array();
  for (const std::string &tok: a.tokens)
    t.push_back(tok);
  return t;
}

selfies::Alphabet alphabet_from_json(const json &t) {
  selfies::Alphabet a;
  for (const json &tok: t)
    a.tokens.push_back(tok.get<std::string>());
  return a;
}

std::uint64_t hash_from_hex(const std::string &s) {
  if (s.size() != 18 || s[0] != '0' || s[1] != 'x')
    throw CorruptFile("bad hash literal '" + s + "'");
  return std::stoull(s.substr(2), nullptr, 16);
}

void write_container(const std::string &model_type, json payload,
                     const std::string &path) {
  json root;
  root["format"] = "moldkl-checkpoint";
  root["version"] = kCheckpointVersion;
  root["model_type"] = model_type;
  root["payload_hash"] = hash_hex(fnv1a64(payload.dump()));
  root["payload"] = std::move(payload);
  atomic_write_file(path, root.dump(2) + "\n");
}

json read_container(const std::string &path,
                    const std::string &expected_type) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::parse_error &e) {
    throw CorruptFile(path + ": " + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != "moldkl-checkpoint")
      throw CorruptFile(path + ": not a checkpoint file");
    const int version = root.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw VersionMismatch(path + ": checkpoint version " +
                            std::to_string(version) + ", expected " +
                            std::to_string(kCheckpointVersion));
    json payload = root.at("payload");
    const std::uint64_t want =
        hash_from_hex(root.at("payload_hash").get<std::string>());
    if (fnv1a64(payload.dump()) != want)
      throw CorruptFile(path + ": payload hash mismatch");
    const std::string type = root.at("model_type").get<std::string>();
    if (!expected_type.empty() && type != expected_type)
      throw ArtifactMismatch(path + ": model type '" + type +
                             "', expected '" + expected_type + "'");
    return payload;
  } catch (const json::exception &e) {
    throw CorruptFile(path + ": " + e.what());
  }
}

}  // namespace

void write_checkpoint(const DklCheckpoint &c, const std::string &path) {
  json cfg;
  cfg["latent_dim"] = c.config.latent_dim;
  cfg["hidden"] = c.config.hidden;
  cfg["epochs"] = c.config.epochs;
  cfg["lr"] = c.config.lr;
  cfg["seed"] = c.config.seed;
  cfg["init_log_lengthscale"] = c.config.init_log_lengthscale;
  cfg["init_log_outputscale"] = c.config.init_log_outputscale;
  cfg["init_log_noise"] = c.config.init_log_noise;

  json p;
  p["config"] = std::move(cfg);
  p["mlp"] = to_json(c.model.params.mlp);
  p["log_lengthscale"] = c.model.params.log_lengthscale;
  p["log_outputscale"] = c.model.params.log_outputscale;
  p["log_noise"] = c.model.params.log_noise;
  p["train_embeddings"] = to_json(c.model.train_embeddings);
  p["alpha"] = to_json(c.model.alpha);
  p["target_mean"] = c.model.target_stats.mean;
  p["target_std"] = c.model.target_stats.std;
  p["jitter"] = c.model.jitter;
  p["alphabet"] = alphabet_to_json(c.alphabet);
  p["max_len"] = c.max_len;
  p["target_name"] = c.target_name;
  p["dataset_hash"] = hash_hex(c.dataset_hash);
  write_container("dkl", std::move(p), path);
}

DklCheckpoint read_dkl_checkpoint(const std::string &path) {
  const json p = read_container(path, "dkl");
  try {
    DklCheckpoint c;
    const json &cfg = p.at("config");
    c.config.latent_dim = cfg.at("latent_dim").get<int>();
    c.config.hidden = cfg.at("hidden").get<std::vector<num::Index>>();
    c.config.epochs = cfg.at("epochs").get<int>();
    c.config.lr = cfg.at("lr").get<double>();
    c.config.seed = cfg.at("seed").get<std::uint64_t>();
    c.config.init_log_lengthscale =
        cfg.at("init_log_lengthscale").get<double>();
    c.config.init_log_outputscale =
        cfg.at("init_log_outputscale").get<double>();
    c.config.init_log_noise = cfg.at("init_log_noise").get<double>();

    c.model.params.mlp = mlp_from(p.at("mlp"));
    c.model.params.log_lengthscale = p.at("log_lengthscale").get<double>();
    c.model.params.log_outputscale = p.at("log_outputscale").get<double>();
    c.model.params.log_noise = p.at("log_noise").get<double>();
    c.model.train_embeddings = matrix_from(p.at("train_embeddings"));
    c.model.alpha = vector_from(p.at("alpha"));
    c.model.target_stats.mean = p.at("target_mean").get<double>();
    c.model.target_stats.std = p.at("target_std").get<double>();
    c.model.jitter = p.at("jitter").get<double>();
    c.alphabet = alphabet_from_json(p.at("alphabet"));
    c.max_len = p.at("max_len").get<int>();
    c.target_name = p.at("target_name").get<std::string>();
    c.dataset_hash = hash_from_hex(p.at("dataset_hash").get<std::string>());

    // Rebuild the factorization exactly as condition() left it: same
    // embeddings, same hyperparameters, same jitter, hence the same bits.
    const num::Matrix k = gp::kernel_matrix(
        c.model.train_embeddings, c.model.train_embeddings,
        c.model.params.lengthscale(), c.model.params.outputscale());
    num::Matrix ktilde = k;
    ktilde.diagonal().array() += c.model.params.noise() + c.model.jitter;
    c.model.chol = num::cholesky(ktilde);
    return c;
  } catch (const json::exception &e) {
    throw CorruptFile(path + ": " + e.what());
  }
}

void write_checkpoint(const VaeCheckpoint &c, const std::string &path) {
  json cfg;
  cfg["latent_dim"] = c.config.latent_dim;
  cfg["hidden"] = c.config.hidden;
  cfg["epochs"] = c.config.epochs;
  cfg["lr"] = c.config.lr;
  cfg["seed"] = c.config.seed;

  json p;
  p["config"] = std::move(cfg);
  p["encoder"] = to_json(c.params.encoder);
  p["decoder"] = to_json(c.params.decoder);
  p["latent_dim"] = c.params.latent_dim;
  p["max_len"] = c.max_len;
  p["alphabet_size"] = c.params.alphabet_size;
  p["alphabet"] = alphabet_to_json(c.alphabet);
  p["dataset_hash"] = hash_hex(c.dataset_hash);
  write_container("vae", std::move(p), path);
}

VaeCheckpoint read_vae_checkpoint(const std::string &path) {
  const json p = read_container(path, "vae");
  try {
    VaeCheckpoint c;
    const json &cfg = p.at("config");
    c.config.latent_dim = cfg.at("latent_dim").get<int>();
    c.config.hidden = cfg.at("hidden").get<std::vector<num::Index>>();
    c.config.epochs = cfg.at("epochs").get<int>();
    c.config.lr = cfg.at("lr").get<double>();
    c.config.seed = cfg.at("seed").get<std::uint64_t>();

    c.params.encoder = mlp_from(p.at("encoder"));
    c.params.decoder = mlp_from(p.at("decoder"));
    c.params.latent_dim = p.at("latent_dim").get<int>();
    c.max_len = p.at("max_len").get<int>();
    c.params.max_len = c.max_len;
    c.params.alphabet_size = p.at("alphabet_size").get<int>();
    c.alphabet = alphabet_from_json(p.at("alphabet"));
    c.dataset_hash = hash_from_hex(p.at("dataset_hash").get<std::string>());
    return c;
  } catch (const json::exception &e) {
    throw CorruptFile(path + ": " + e.what());
  }
}

std::string checkpoint_model_type(const std::string &path) {
  json root;
  try {
    root = json::parse(read_file(path));
    return root.at("model_type").get<std::string>();
  } catch (const json::exception &e) {
    throw CorruptFile(path + ": " + e.what());
  }
}

}  // namespace moldkl::io
