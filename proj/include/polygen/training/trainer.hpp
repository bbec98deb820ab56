#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polygen/data/manifest.hpp"
#include "polygen/imaging/image.hpp"
#include "polygen/models/discriminator.hpp"
#include "polygen/models/generator.hpp"
#include "polygen/training/losses.hpp"

namespace polygen {

struct TrainingConfig {
  float lambda = 100.0f;
  float lr = 2e-4f;
  float beta1 = 0.5f;
  int batch_size = 1;  // the loop is written for the paper's batch size of 1
  int steps = 2000;
  double jitter_ratio = 1.21875;  // 312/256
  std::uint64_t seed = 7;
  ReconWeights head_weights;
  int checkpoint_every = 500;

  void validate() const;
};

TrainingConfig load_training_config(const std::string& path);
void save_training_config(const std::string& path, const TrainingConfig& cfg);

struct StepReport {
  int step = 0;
  float d_loss = 0.0f;
  float g_gan = 0.0f;
  float l2_s4 = 0.0f;
  float l1_s2 = 0.0f;
  float l1_s1 = 0.0f;
  float g_grad_norm = 0.0f;
  float d_grad_norm = 0.0f;
};

// One conditioned/target pair, both (1, C, S, S) in [-1, 1].
struct TrainingPair {
  Tensor x;
  Tensor y;
  std::string id;
};

// Both tensors resized by nearest neighbour to round(ratio * S) and cropped
// back to S at one shared random offset.
TrainingPair jitter(const TrainingPair& pair, Rng& rng, double ratio);

TrainingPair load_training_pair(const PairEntry& entry);

// Alternating optimization of Eq. (1)-(3): per step, one discriminator
// update on (real, detached fake) followed by one generator update on the
// non-saturating adversarial loss plus lambda times the multi-scale
// reconstruction loss. Writes loss.csv, periodic checkpoints and sample
// grids under out_dir. Throws NumericError on a non-finite loss.
std::vector<StepReport> train(const std::vector<TrainingPair>& dataset,
                              GeneratorNet& gen, PatchDiscriminator& disc,
                              const TrainingConfig& cfg, const std::string& out_dir);

// Runs the generator on one conditioned image; dropout stays active as the
// realization of the noise input, so different rng states give different
// images over the same conditioned geometry.
GrayImage generate(const GeneratorNet& gen, const ConditionedImage& conditioned,
                   Rng& rng);

Tensor conditioned_to_tensor(const ConditionedImage& img);
Tensor gray_to_tensor(const GrayImage& img);
GrayImage tensor_to_gray(const Tensor& t);

}  // namespace polygen
