#pragma once

#include <cstdint>
#include <string>

#include "dga/model.hpp"
#include "dga/trainer.hpp"

namespace dga {

// Everything a run needs, fed from CLI flags and/or a key=value config file
// (flags win). Defaults follow the architecture's published operating point
// where one exists, desk-scale choices elsewhere.
struct RunConfig {
  // model shape
  real window = real(4);      // D
  std::size_t steps = 4;      // T
  std::size_t attn = 200;     // attention size a
  std::size_t dim = 64;       // hidden size d
  std::size_t layers = 2;     // encoder depth L
  std::size_t max_len = 64;

  // optimization
  real lr = real(1e-4);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real weight_decay = real(1e-5);
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  std::uint64_t seed = 42;

  // ablation and variant switches
  bool no_global = false;
  bool no_detail = false;
  bool no_gaussian = false;
  bool mean_pool_position = false;
  bool log_mask = false;
  bool single_cls = false;
  bool l2_norm_exact = false;

  // paths
  std::string train_path, valid_path, test_path;
  std::string labels_path, vocab_path;
  std::string checkpoint_in, checkpoint_out;
  std::string report_path;
  std::string embeddings_path;
};

// Throws FormatError on violated invariants (zero counts, both match-vector
// ablations at once, max_len too small for the token layout, ...).
void validate(const RunConfig& cfg);

// key=value lines, one per setting; '#' starts a comment. Keys use the same
// kebab-case names as the CLI flags ("window-size=6", "no-gaussian=true").
// Unknown keys and unparseable values are FormatErrors. CLI flags parsed
// afterwards override whatever the file set.
void apply_config_file(const std::string& path, RunConfig& cfg);

ModelConfig to_model_config(const RunConfig& cfg, std::size_t vocab_size, std::size_t classes);
TrainOptions to_train_options(const RunConfig& cfg);

}  // namespace dga
