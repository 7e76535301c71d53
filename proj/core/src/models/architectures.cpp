// SPDX-License-Identifier: Apache-2.0
#include "linetrace/models/architectures.hpp"

#include <stdexcept>

namespace linetrace::models {

using nn::ActivationKind;
using nn::ConvOrientation;
using nn::LayerSpec;

std::string architecture_name(Architecture arch) { return arch == Architecture::Mlp ? "mlp" : "cnn1d"; }

Architecture parse_architecture(const std::string& name) {
  if (name == "mlp") return Architecture::Mlp;
  if (name == "cnn1d" || name == "cnn") return Architecture::Cnn1d;
  throw std::invalid_argument("model must be 'mlp' or 'cnn1d', got '" + name + "'");
}

std::vector<LayerSpec> mlp_layers(const MlpDims& d) {
  return {
      LayerSpec::dense(d.hidden1),
      LayerSpec::activation_of(ActivationKind::Relu),
      LayerSpec::dropout(d.dropout1),
      LayerSpec::dense(d.hidden2),
      LayerSpec::activation_of(ActivationKind::Relu),
      LayerSpec::batchnorm(),
      LayerSpec::dropout(d.dropout2),
      LayerSpec::dense(d.hidden3),
      LayerSpec::activation_of(ActivationKind::Relu),
      LayerSpec::dense(2),
  };
}

std::vector<LayerSpec> cnn1d_layers(const CnnDims& d) {
  return {
      LayerSpec::conv1d(d.conv1_filters, d.conv1_kernel, ConvOrientation::ChannelsFirst),
      LayerSpec::activation_of(ActivationKind::Softsign),
      LayerSpec::dropout(d.dropout1),
      LayerSpec::maxpool_axis0(d.pool),
      LayerSpec::dense(d.dense1),
      LayerSpec::activation_of(d.interior_activation),
      LayerSpec::batchnorm(),
      LayerSpec::dropout(d.dropout2),
      LayerSpec::conv1d(d.conv2_filters, d.conv2_kernel, ConvOrientation::ChannelsLast),
      LayerSpec::activation_of(ActivationKind::Softsign),
      LayerSpec::dense(d.dense2),
      LayerSpec::activation_of(d.interior_activation),
      LayerSpec::batchnorm(),
      LayerSpec::dropout(d.dropout3),
      LayerSpec::dropout(d.dropout4),
      LayerSpec::flatten(),
      LayerSpec::dense(2),
  };
}

nn::Network build_mlp(std::uint64_t seed, const MlpDims& dims) {
  return nn::Network({1, dims.input}, mlp_layers(dims), seed);
}

nn::Network build_cnn1d(std::uint64_t seed, const CnnDims& dims) {
  return nn::Network({1, dims.input}, cnn1d_layers(dims), seed);
}

nn::Network build(Architecture arch, std::uint64_t seed) {
  return arch == Architecture::Mlp ? build_mlp(seed) : build_cnn1d(seed);
}

std::vector<TableRow> architecture_table(const nn::Network& net) {
  std::vector<TableRow> rows{{"input", net.input_shape()}};
  for (std::size_t i = 0; i < net.specs().size(); ++i) {
    const LayerSpec& spec = net.specs()[i];
    if (spec.kind == nn::LayerKind::Activation) {
      if (!rows.empty()) rows.back().output = net.layer_shapes()[i];
      continue;
    }
    rows.push_back({spec.describe(), net.layer_shapes()[i]});
  }
  return rows;
}

ParamComparison compare_param_counts() {
  ParamComparison c;
  c.cnn1d = build_cnn1d().parameter_count();
  c.mlp = build_mlp().parameter_count();
  c.reduction = 1.0 - double(c.cnn1d) / double(c.mlp);
  return c;
}

}  // namespace linetrace::models
