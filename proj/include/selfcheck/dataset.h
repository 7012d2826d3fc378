// Copyright 2026 The selfcheck Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Labeled tensor collections and their on-disk layout.
//
// A dataset directory holds one tensor file per sample plus `labels.tsv`,
// one line per sample: "<file name>\t<class index>". Files are listed in
// sample order. A tensor file is
//
//   "LNCT"  magic
//   u32     rank, then rank x u32 dims
//   f32     data, row-major, little-endian

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selfcheck/binary_io.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

struct LabeledSet {
  std::vector<Tensor> inputs;
  std::vector<std::size_t> labels;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  void Add(Tensor t, std::size_t label) {
    inputs.push_back(std::move(t));
    labels.push_back(label);
  }
};

Bytes EncodeTensor(const Tensor& t);
Tensor DecodeTensor(std::span<const std::uint8_t> bytes);
Tensor LoadTensorFile(const std::string& path);
void SaveTensorFile(const Tensor& t, const std::string& path);

// Writes sample_00000.lnct ... and labels.tsv; creates the directory.
void SaveDataset(const LabeledSet& set, const std::string& dir);
LabeledSet LoadDataset(const std::string& dir);

}  // namespace selfcheck
