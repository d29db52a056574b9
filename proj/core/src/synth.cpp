#include "permalign/synth.hpp"

#include <algorithm>

#include "permalign/errors.hpp"
#include "permalign/rng.hpp"

namespace permalign {

void SynthSpec::validate() const {
  if (input_dim == 0 || classes < 2) throw ConfigError("synth: need dim >= 1, classes >= 2");
  if (train_count == 0 || test_count == 0) throw ConfigError("synth: empty split");
  if (noise < 0.0) throw ConfigError("synth: negative noise");
}

namespace {

Dataset sample_split(const SynthSpec& spec, const Matrix& prototypes, std::size_t count,
                     RngState& rng) {
  Dataset data;
  data.inputs = Matrix(spec.input_dim, count);
  data.targets = Matrix(spec.classes, count);
  data.labels.resize(count);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t label = rng.next_u64() % spec.classes;
    data.labels[c] = static_cast<int>(label);
    data.targets(label, c) = 1.0;
    const double* proto = prototypes.row_ptr(label);
    for (std::size_t r = 0; r < spec.input_dim; ++r) {
      const double v = proto[r] + spec.noise * rng.next_gaussian();
      data.inputs(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  data.validate();
  return data;
}

}  // namespace

SynthData make_synth_classification(const SynthSpec& spec) {
  spec.validate();
  RngState master(spec.seed);
  RngState proto_rng = master.child(0);
  Matrix prototypes(spec.classes, spec.input_dim);
  for (double& v : prototypes.data()) v = proto_rng.next_unit();

  RngState train_rng = master.child(1);
  RngState test_rng = master.child(2);
  SynthData out;
  out.train = sample_split(spec, prototypes, spec.train_count, train_rng);
  out.test = sample_split(spec, prototypes, spec.test_count, test_rng);
  return out;
}

}  // namespace permalign
