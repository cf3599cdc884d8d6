// Copyright 2026 The Hieracoustic Authors
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

#include "asc/network.h"

#include <cmath>
#include <fstream>

#include "asc/io_binary.h"

namespace asc {

namespace {

constexpr char kModelMagic[4] = {'H', 'A', 'C', 'M'};
constexpr uint32_t kModelVersion = 1;

void write_layer(std::ostream& os, const Layer<float>& layer) {
  write_u32_le(os, static_cast<uint32_t>(layer.in_dim()));
  write_u32_le(os, static_cast<uint32_t>(layer.out_dim()));
  write_u8(os, static_cast<uint8_t>(layer.activation));
  for (size_t i = 0; i < layer.weights.size(); ++i) {
    write_f32_le(os, layer.weights.data()[i]);
  }
  for (float b : layer.bias) write_f32_le(os, b);
}

Layer<float> read_layer(std::istream& is, const std::string& path) {
  const uint32_t in = read_u32_le(is, path);
  const uint32_t out = read_u32_le(is, path);
  const uint8_t act = read_u8(is, path);
  if (act > static_cast<uint8_t>(Activation::kSoftmax)) {
    throw DataError(path + ": unknown activation code " + std::to_string(act));
  }
  if (in == 0 || out == 0) {
    throw DataError(path + ": layer with a zero dimension");
  }
  Layer<float> layer;
  layer.activation = static_cast<Activation>(act);
  layer.weights.resize(out, in);
  for (size_t i = 0; i < layer.weights.size(); ++i) {
    layer.weights.data()[i] = read_f32_le(is, path);
  }
  layer.bias.resize(out);
  for (float& b : layer.bias) b = read_f32_le(is, path);
  return layer;
}

}  // namespace

void save_model(const Network<float>& net, const std::string& path) {
  net.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open model file for writing: " + path);
  write_magic(os, kModelMagic);
  write_u32_le(os, kModelVersion);
  write_u32_le(os, static_cast<uint32_t>(net.input_dim));
  write_u32_le(os, static_cast<uint32_t>(net.hidden.size()));
  for (const auto& layer : net.hidden) write_layer(os, layer);
  write_layer(os, net.low_head);
  write_u8(os, net.high_head ? 1 : 0);
  if (net.high_head) write_layer(os, *net.high_head);
  write_f32_le(os, net.dropout_input);
  write_f32_le(os, net.dropout_hidden);
  os.flush();
  if (!os) throw DataError("failed writing model file: " + path);
}

Network<float> load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open model file: " + path);
  expect_magic(is, kModelMagic, path);
  const uint32_t version = read_u32_le(is, path);
  if (version != kModelVersion) {
    throw DataError(path + ": unsupported model version " +
                    std::to_string(version));
  }
  Network<float> net;
  net.input_dim = read_u32_le(is, path);
  const uint32_t n_hidden = read_u32_le(is, path);
  net.hidden.reserve(n_hidden);
  for (uint32_t l = 0; l < n_hidden; ++l) {
    net.hidden.push_back(read_layer(is, path));
  }
  net.low_head = read_layer(is, path);
  const uint8_t has_high = read_u8(is, path);
  if (has_high > 1) {
    throw DataError(path + ": corrupt high-head flag");
  }
  if (has_high) net.high_head = read_layer(is, path);
  net.dropout_input = read_f32_le(is, path);
  net.dropout_hidden = read_f32_le(is, path);
  if (!std::isfinite(net.dropout_input) || !std::isfinite(net.dropout_hidden)) {
    throw DataError(path + ": non-finite dropout rate");
  }
  net.validate();
  return net;
}

}  // namespace asc
