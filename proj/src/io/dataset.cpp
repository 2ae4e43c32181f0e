//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/io/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"
#include "moldkl/io/files.hpp"
#include "moldkl/num/rng.hpp"

namespace moldkl::io {

namespace {

std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c: line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

bool parse_double(const std::string &text, double &out) {
  const char *begin = text.data();
  const char *end = begin + text.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace

std::uint64_t Dataset::content_hash() const {
  std::vector<const DataRecord *> order;
  order.reserve(records.size());
  for (const DataRecord &r: records)
    order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const DataRecord *a, const DataRecord *b) {
              return a->id < b->id;
            });
  std::uint64_t h = kFnvOffset;
  for (const DataRecord *r: order) {
    h = fnv1a64(r->id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(r->smiles, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(format_double(r->target), h);
    h = fnv1a64("\x1e", h);
  }
  return h;
}

Dataset load_csv_text(std::string_view text, const CsvSchema &schema,
                      LoadReport *report) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line))
    throw EmptyDataset("no header row");
  const std::vector<std::string> header = split_line(line);
  const auto column = [&](const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw MissingColumn("no column '" + name + "' in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column(schema.id_col);
  const std::size_t smiles_col = column(schema.smiles_col);
  const std::size_t target_col = column(schema.target_col);

  Dataset ds;
  ds.target_name = schema.target_col;
  std::set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r")
      continue;
    const std::vector<std::string> fields = split_line(line);
    const auto reject = [&](const std::string &id,
                            const std::string &reason) {
      if (report)
        report->rejects.push_back({lineno, id, reason});
    };
    if (fields.size() != header.size()) {
      reject("", "expected " + std::to_string(header.size()) +
                     " fields, got " + std::to_string(fields.size()));
      continue;
    }
    DataRecord rec;
    rec.id = fields[id_col];
    rec.smiles = fields[smiles_col];
    if (rec.id.empty()) {
      reject("", "empty id");
      continue;
    }
    try {
      chem::parse_smiles(rec.smiles);
    } catch (const ParseError &e) {
      reject(rec.id, std::string("bad SMILES: ") + e.what());
      continue;
    }
    if (!parse_double(fields[target_col], rec.target) ||
        !std::isfinite(rec.target)) {
      reject(rec.id, "target '" + fields[target_col] + "' is not finite");
      continue;
    }
    if (!seen.insert(rec.id).second)
      throw DuplicateId("duplicate id '" + rec.id + "'");
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty())
    throw EmptyDataset("no valid rows");
  return ds;
}

Dataset load_csv(const std::string &path, const CsvSchema &schema,
                 LoadReport *report) {
  return load_csv_text(read_file(path), schema, report);
}

std::string dataset_to_csv(const Dataset &ds, const CsvSchema &schema) {
  std::string out =
      schema.id_col + "," + schema.smiles_col + "," + schema.target_col;
  out += '\n';
  for (const DataRecord &r: ds.records) {
    out += r.id;
    out += ',';
    out += r.smiles;
    out += ',';
    out += format_double(r.target);
    out += '\n';
  }
  return out;
}

Dataset sample_subset(const Dataset &ds, int n, std::uint64_t seed) {
  const int total = ds.size();
  if (n < 0 || n > total)
    throw SubsetTooLarge("cannot take " + std::to_string(n) + " of " +
                         std::to_string(total) + " records");
  std::vector<int> idx(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i)
    idx[static_cast<std::size_t>(i)] = i;
  num::Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const int j =
        i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
                total - i)));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(n));
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.target_name = ds.target_name;
  out.records.reserve(static_cast<std::size_t>(n));
  for (int i: idx)
    out.records.push_back(ds.records[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace moldkl::io
