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

#include "selfcheck/dataset.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace selfcheck {

Bytes EncodeTensor(const Tensor& t) {
  ByteWriter w;
  w.Raw("LNCT", 4);
  w.U32(static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) w.U32(static_cast<std::uint32_t>(d));
  w.F32s(t.values());
  return w.Take();
}

Tensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "tensor");
  r.Magic("LNCT");
  std::uint32_t rank = r.U32();
  if (rank == 0 || rank > 8) throw FormatError("tensor: unsupported rank " + std::to_string(rank));
  Shape shape(rank);
  std::size_t n = 1;
  for (auto& d : shape) {
    d = r.U32();
    if (d == 0) throw FormatError("tensor: zero dimension");
    n *= d;
    if (n > (std::size_t{1} << 32)) throw FormatError("tensor: too many elements");
  }
  auto data = r.F32s(n);
  r.ExpectEnd();
  return Tensor(std::move(shape), std::move(data));
}

Tensor LoadTensorFile(const std::string& path) {
  try {
    return DecodeTensor(ReadFileBytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void SaveTensorFile(const Tensor& t, const std::string& path) {
  WriteFileBytes(path, EncodeTensor(t));
}

void SaveDataset(const LabeledSet& set, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream index(std::filesystem::path(dir) / "labels.tsv", std::ios::trunc);
  if (!index) throw Error("cannot write label index in " + dir);
  for (std::size_t i = 0; i < set.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu.lnct", i);
    SaveTensorFile(set.inputs[i], (std::filesystem::path(dir) / name).string());
    index << name << '\t' << set.labels[i] << '\n';
  }
}

LabeledSet LoadDataset(const std::string& dir) {
  const auto index_path = std::filesystem::path(dir) / "labels.tsv";
  std::ifstream index(index_path);
  if (!index) throw Error("missing label index " + index_path.string());
  LabeledSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(index, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string name;
    long long label = -1;
    if (!std::getline(fields, name, '\t') || !(fields >> label) || label < 0)
      throw FormatError(index_path.string() + ":" + std::to_string(line_no) +
                        ": expected \"<file>\\t<class index>\"");
    set.Add(LoadTensorFile((std::filesystem::path(dir) / name).string()),
            static_cast<std::size_t>(label));
  }
  return set;
}

}  // namespace selfcheck
