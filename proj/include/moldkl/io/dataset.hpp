//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_IO_DATASET_HPP_
#define MOLDKL_IO_DATASET_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace moldkl::io {

struct DataRecord {
  std::string id;
  std::string smiles;
  double target = 0.0;
};

struct Dataset {
  std::string target_name;
  std::vector<DataRecord> records;

  int size() const { return static_cast<int>(records.size()); }

  // FNV-1a over the records in id order; invariant to record ordering,
  // sensitive to any field change.
  std::uint64_t content_hash() const;
};

struct CsvSchema {
  std::string id_col = "id";
  std::string smiles_col = "smiles";
  std::string target_col = "target";
};

struct RowReject {
  std::size_t line = 0;  // 1-based line number in the file
  std::string id;
  std::string reason;
};

struct LoadReport {
  std::vector<RowReject> rejects;
};

// Plain comma-separated file, no quoting, first row is the header. Rows
// whose SMILES does not parse or whose target is not finite are dropped
// into the report; survivors must be non-empty with unique ids.
Dataset load_csv_text(std::string_view text, const CsvSchema &schema,
                      LoadReport *report = nullptr);
Dataset load_csv(const std::string &path, const CsvSchema &schema,
                 LoadReport *report = nullptr);

std::string dataset_to_csv(const Dataset &ds, const CsvSchema &schema);

// Without-replacement draw of n records; survivors keep their original
// order. Throws SubsetTooLarge.
Dataset sample_subset(const Dataset &ds, int n, std::uint64_t seed);

}  // namespace moldkl::io

#endif  // MOLDKL_IO_DATASET_HPP_
