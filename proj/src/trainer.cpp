#include "polygen/training/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "polygen/core/error.hpp"
#include "polygen/tensor/adam.hpp"
#include "polygen/tensor/checkpoint.hpp"

namespace polygen {

namespace fs = std::filesystem;
using nlohmann::json;

void TrainingConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("train: " + msg); };
  if (lambda < 0.0f) fail("lambda must be >= 0");
  if (!(lr > 0.0f)) fail("learning rate must be positive");
  if (batch_size != 1) fail("batch size is fixed to 1");
  if (steps < 1) fail("step count must be positive");
  if (!(jitter_ratio > 1.0)) fail("jitter ratio must be > 1");
  if (checkpoint_every < 1) fail("checkpoint cadence must be positive");
}

TrainingConfig load_training_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("train: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("train: bad JSON in " + path + ": " + e.what());
  }
  TrainingConfig cfg;
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.jitter_ratio = j.value("jitter_ratio", cfg.jitter_ratio);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
  if (j.contains("head_weights")) {
    const auto& w = j["head_weights"];
    if (!w.is_array() || w.size() != 3)
      throw DataError("train: head_weights must be [w_s4, w_s2, w_s1]");
    cfg.head_weights = {w[0].get<float>(), w[1].get<float>(), w[2].get<float>()};
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(e.what()) + " (from " + path + ")");
  }
  return cfg;
}

void save_training_config(const std::string& path, const TrainingConfig& cfg) {
  json j;
  j["lambda"] = cfg.lambda;
  j["lr"] = cfg.lr;
  j["beta1"] = cfg.beta1;
  j["batch_size"] = cfg.batch_size;
  j["steps"] = cfg.steps;
  j["jitter_ratio"] = cfg.jitter_ratio;
  j["seed"] = cfg.seed;
  j["head_weights"] = {cfg.head_weights.s4, cfg.head_weights.s2, cfg.head_weights.s1};
  j["checkpoint_every"] = cfg.checkpoint_every;
  std::ofstream f(path);
  if (!f) throw DataError("train: cannot write " + path);
  f << j.dump(2) << "\n";
}

Tensor conditioned_to_tensor(const ConditionedImage& img) {
  std::vector<float> data(img.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = img.pixels[i] ? 1.0f : -1.0f;
  return Tensor::from_data({1, 1, img.height, img.width}, std::move(data));
}

Tensor gray_to_tensor(const GrayImage& img) {
  std::vector<float> data(img.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<float>(img.pixels[i]) / 127.5f - 1.0f;
  return Tensor::from_data({1, 1, img.height, img.width}, std::move(data));
}

GrayImage tensor_to_gray(const Tensor& t) {
  const Shape& s = t.shape();
  GrayImage img = GrayImage::filled(s.w, s.h, 0);
  for (int y = 0; y < s.h; ++y)
    for (int x = 0; x < s.w; ++x) {
      const float v = (t.at(0, 0, y, x) + 1.0f) * 127.5f;
      img.at(y, x) = static_cast<std::uint8_t>(std::clamp(v + 0.5f, 0.0f, 255.0f));
    }
  return img;
}

TrainingPair load_training_pair(const PairEntry& entry) {
  GrayImage cond = read_gray(entry.conditioned);
  GrayImage target = read_gray(entry.target);
  if (cond.width != target.width || cond.height != target.height)
    throw DataError("train: pair " + entry.id + " has mismatched extents");
  std::vector<float> x(cond.pixels.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = cond.pixels[i] >= 128 ? 1.0f : -1.0f;
  TrainingPair pair;
  pair.x = Tensor::from_data({1, 1, cond.height, cond.width}, std::move(x));
  pair.y = gray_to_tensor(target);
  pair.id = entry.id;
  return pair;
}

namespace {

Tensor crop_hw(const Tensor& t, int oy, int ox, int size) {
  const Shape& s = t.shape();
  Tensor out = Tensor::zeros({s.n, s.c, size, size});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          out.at(n, c, y, x) = t.at(n, c, oy + y, ox + x);
  return out;
}

double grad_norm(const std::vector<NamedTensor>& params) {
  double acc = 0.0;
  for (const auto& p : params)
    for (float g : p.tensor.grad()) acc += static_cast<double>(g) * g;
  return std::sqrt(acc);
}

void zero_grads(std::vector<NamedTensor>& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

std::vector<NamedTensor> checkpoint_tensors(GeneratorNet& gen,
                                            PatchDiscriminator& disc) {
  std::vector<NamedTensor> all = gen.params();
  const auto& d = disc.params();
  all.insert(all.end(), d.begin(), d.end());
  return all;
}

void write_samples(const std::string& path, const Tensor& x, const Tensor& y,
                   const Tensor& fake) {
  // side-by-side montage: conditioned | target | generated
  GrayImage cx = tensor_to_gray(x);
  GrayImage cy = tensor_to_gray(y);
  GrayImage cf = tensor_to_gray(fake);
  GrayImage grid = GrayImage::filled(cx.width * 3, cx.height, 0);
  for (int r = 0; r < cx.height; ++r)
    for (int c = 0; c < cx.width; ++c) {
      grid.at(r, c) = cx.at(r, c);
      grid.at(r, c + cx.width) = cy.at(r, c);
      grid.at(r, c + 2 * cx.width) = cf.at(r, c);
    }
  write_gray(path, grid);
}

}  // namespace

TrainingPair jitter(const TrainingPair& pair, Rng& rng, double ratio) {
  const Shape& s = pair.x.shape();
  const int size = s.h;
  const int enlarged = static_cast<int>(std::lround(ratio * size));
  if (enlarged == size) return pair;
  Tensor xr = nearest_resize_to(pair.x, enlarged, enlarged);
  Tensor yr = nearest_resize_to(pair.y, enlarged, enlarged);
  const int oy = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(enlarged - size + 1)));
  const int ox = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(enlarged - size + 1)));
  return {crop_hw(xr, oy, ox, size), crop_hw(yr, oy, ox, size), pair.id};
}

std::vector<StepReport> train(const std::vector<TrainingPair>& dataset,
                              GeneratorNet& gen, PatchDiscriminator& disc,
                              const TrainingConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (dataset.empty()) throw DataError("train: empty dataset");
  const int S = gen.config().extent;
  for (const auto& p : dataset)
    if (p.x.shape().h != S || p.x.shape().w != S)
      throw DataError("train: pair " + p.id + " extent does not match generator");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("train: cannot create " + out_dir);

  Rng data_rng(derive_seed(cfg.seed, "train/data"));
  Rng jitter_rng(derive_seed(cfg.seed, "train/jitter"));
  Rng g_rng(derive_seed(cfg.seed, "train/dropout"));

  AdamConfig opt_cfg;
  opt_cfg.lr = cfg.lr;
  opt_cfg.beta1 = cfg.beta1;
  std::vector<Tensor> g_params, d_params;
  for (auto& p : gen.params()) g_params.push_back(p.tensor);
  for (auto& p : disc.params()) d_params.push_back(p.tensor);
  Adam adam_g(g_params, opt_cfg);
  Adam adam_d(d_params, opt_cfg);

  std::ofstream loss_csv(fs::path(out_dir) / "loss.csv");
  if (!loss_csv) throw DataError("train: cannot write loss.csv under " + out_dir);
  loss_csv << "step,d_loss,g_gan,l2_s4,l1_s2,l1_s1,g_grad_norm,d_grad_norm\n";

  auto save_ckpt = [&](const std::string& tag) {
    auto tensors = checkpoint_tensors(gen, disc);
    save_checkpoint((fs::path(out_dir) / ("ckpt_" + tag + ".json")).string(), tensors);
  };

  std::vector<StepReport> reports;
  reports.reserve(cfg.steps);
  char buf[256];
  for (int step = 1; step <= cfg.steps; ++step) {
    const std::size_t idx = data_rng.uniform_int(dataset.size());
    TrainingPair pair = jitter(dataset[idx], jitter_rng, cfg.jitter_ratio);

    MultiScaleOutput outs = gen.forward(pair.x, g_rng);
    Tensor fake = outs.s1;

    // Discriminator update; the fake is detached so nothing reaches G.
    Tensor d_real = disc.forward(pair.x, pair.y);
    Tensor d_fake_detached = disc.forward(pair.x, fake.detach());
    Tensor dl = d_loss(d_real, d_fake_detached);
    zero_grads(disc.params());
    backward(dl);
    const double dn = grad_norm(disc.params());
    adam_d.step();

    // Generator update on the same fake, now through a live discriminator
    // pass; D's gradients from this pass are discarded at its next update.
    Tensor d_fake = disc.forward(pair.x, fake);
    Tensor gl = g_gan_loss(d_fake);
    ReconLosses rl = recon_loss(outs, pair.y, cfg.head_weights);
    Tensor total = total_g_loss(gl, rl.total, cfg.lambda);
    zero_grads(gen.params());
    zero_grads(disc.params());
    backward(total);
    const double gn = grad_norm(gen.params());
    adam_g.step();

    StepReport r;
    r.step = step;
    r.d_loss = dl.item();
    r.g_gan = gl.item();
    r.l2_s4 = rl.l2_s4.item();
    r.l1_s2 = rl.l1_s2.item();
    r.l1_s1 = rl.l1_s1.item();
    r.g_grad_norm = static_cast<float>(gn);
    r.d_grad_norm = static_cast<float>(dn);

    const bool finite = std::isfinite(r.d_loss) && std::isfinite(r.g_gan) &&
                        std::isfinite(r.l2_s4) && std::isfinite(r.l1_s2) &&
                        std::isfinite(r.l1_s1) && std::isfinite(r.g_grad_norm) &&
                        std::isfinite(r.d_grad_norm);
    std::snprintf(buf, sizeof(buf), "%d,%.7g,%.7g,%.7g,%.7g,%.7g,%.7g,%.7g\n", r.step,
                  r.d_loss, r.g_gan, r.l2_s4, r.l1_s2, r.l1_s1, r.g_grad_norm,
                  r.d_grad_norm);
    loss_csv << buf;
    reports.push_back(r);
    if (!finite) {
      loss_csv.flush();
      std::snprintf(buf, sizeof(buf),
                    "train: non-finite loss at step %d (d=%g g_gan=%g l1_s1=%g)",
                    step, r.d_loss, r.g_gan, r.l1_s1);
      throw NumericError(buf);
    }

    if (step % cfg.checkpoint_every == 0) {
      std::snprintf(buf, sizeof(buf), "%06d", step);
      save_ckpt(buf);
      write_samples((fs::path(out_dir) / ("samples_" + std::string(buf) + ".png")).string(),
                    pair.x, pair.y, fake);
    }
  }
  save_ckpt("final");
  return reports;
}

GrayImage generate(const GeneratorNet& gen, const ConditionedImage& conditioned,
                   Rng& rng) {
  if (conditioned.width != gen.config().extent ||
      conditioned.height != gen.config().extent)
    throw DataError("generate: conditioned extent " +
                    std::to_string(conditioned.width) + "x" +
                    std::to_string(conditioned.height) +
                    " does not match generator extent " +
                    std::to_string(gen.config().extent));
  Tensor x = conditioned_to_tensor(conditioned);
  MultiScaleOutput outs = gen.forward(x, rng);
  return tensor_to_gray(outs.s1);
}

}  // namespace polygen
