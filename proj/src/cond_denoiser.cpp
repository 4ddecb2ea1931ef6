#include "sarcs/cond_denoiser.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"

namespace sarcs {

std::size_t PatchRegressor::bucket_of(std::size_t t) const {
  require(t >= 1 && t <= total_steps, ErrorKind::Usage,
          "timestep " + std::to_string(t) + " outside [1, " +
              std::to_string(total_steps) + "]");
  const std::size_t width = std::max<std::size_t>(1, total_steps / bucket_count);
  return std::min(bucket_count - 1, (t - 1) / width);
}

PatchPair extract_training_patch(const TrainingPair& pair,
                                 std::size_t patch_size, Rng& rng) {
  const std::size_t rows = pair.clean.pixels.rows();
  const std::size_t cols = pair.clean.pixels.cols();
  require(pair.condition.pixels.rows() == rows &&
              pair.condition.pixels.cols() == cols,
          ErrorKind::Data, "training pair images differ in shape");
  require(patch_size >= 1 && patch_size <= rows && patch_size <= cols,
          ErrorKind::Usage, "patch size exceeds image dimensions");

  PatchPair out;
  out.row0 = static_cast<std::size_t>(
      rng.below(static_cast<std::uint64_t>(rows - patch_size + 1)));
  out.col0 = static_cast<std::size_t>(
      rng.below(static_cast<std::uint64_t>(cols - patch_size + 1)));
  out.clean = GridD(patch_size, patch_size);
  out.condition = GridD(patch_size, patch_size);
  for (std::size_t r = 0; r < patch_size; ++r)
    for (std::size_t c = 0; c < patch_size; ++c) {
      out.clean(r, c) = pair.clean.pixels(out.row0 + r, out.col0 + c);
      out.condition(r, c) = pair.condition.pixels(out.row0 + r, out.col0 + c);
    }
  return out;
}

namespace {

// Per-bucket normal equation blocks for features [x; c; 1].
struct BucketStats {
  Eigen::MatrixXd gram;  // f x f
  Eigen::MatrixXd rhs;   // f x d
  std::size_t count = 0;
};

struct HeldoutSample {
  Eigen::VectorXd features;
  Eigen::VectorXd target;
  std::size_t bucket;
};

}  // namespace

PatchRegressor train_regressor(const std::vector<TrainingPair>& pairs,
                               const NoiseSchedule& schedule,
                               const TrainConfig& config,
                               TrainReport* report) {
  require(!pairs.empty(), ErrorKind::Usage, "training needs at least one pair");
  require(config.patch_size >= 1, ErrorKind::Usage, "patch size must be positive");
  require(config.bucket_count >= 1 &&
              config.bucket_count <= schedule.total_steps(),
          ErrorKind::Usage, "bucket count must lie in [1, T]");
  require(config.ridge_lambda >= 0.0, ErrorKind::Usage,
          "ridge lambda must be nonnegative");
  require(config.samples_per_pair >= 1, ErrorKind::Usage,
          "samples_per_pair must be positive");

  PatchRegressor model;
  model.patch_size = config.patch_size;
  model.bucket_count = config.bucket_count;
  model.total_steps = schedule.total_steps();
  model.ridge_lambda = config.ridge_lambda;

  const std::size_t d = model.dim();
  const std::size_t f = 2 * d + 1;
  const std::size_t B = config.bucket_count;
  const std::size_t T = schedule.total_steps();

  std::vector<BucketStats> stats(B);
  for (auto& s : stats) {
    s.gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f),
                                   static_cast<Eigen::Index>(f));
    s.rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f),
                                  static_cast<Eigen::Index>(d));
  }
  std::vector<HeldoutSample> heldout;

  // Pair order is the reduction order; per-pair substreams keep the draw
  // sequence independent of any parallel pair processing.
  Eigen::VectorXd feat(static_cast<Eigen::Index>(f));
  Eigen::VectorXd target(static_cast<Eigen::Index>(d));
  GridD eps(config.patch_size, config.patch_size);
  for (std::size_t ip = 0; ip < pairs.size(); ++ip) {
    Rng rng(derive_seed(config.seed, ip));
    for (std::size_t s = 0; s < config.samples_per_pair; ++s) {
      PatchPair patch = extract_training_patch(pairs[ip], config.patch_size, rng);
      const auto t = static_cast<std::size_t>(
          rng.below(static_cast<std::uint64_t>(T))) + 1;
      for (auto& v : eps.storage()) v = rng.gaussian();
      Latent x0{patch.clean, 0};
      const Latent xt = q_sample(x0, t, eps, schedule);

      for (std::size_t i = 0; i < d; ++i) {
        feat[static_cast<Eigen::Index>(i)] = xt.pixels.storage()[i];
        feat[static_cast<Eigen::Index>(d + i)] = patch.condition.storage()[i];
        target[static_cast<Eigen::Index>(i)] = eps.storage()[i];
      }
      feat[static_cast<Eigen::Index>(2 * d)] = 1.0;

      const std::size_t b = model.bucket_of(t);
      if (s % 8 == 7) {
        heldout.push_back({feat, target, b});
      } else {
        stats[b].gram.selfadjointView<Eigen::Lower>().rankUpdate(feat);
        stats[b].rhs.noalias() += feat * target.transpose();
        ++stats[b].count;
      }
    }
  }

  model.weights.assign(B, std::vector<double>(d * 2 * d, 0.0));
  model.biases.assign(B, std::vector<double>(d, 0.0));
  TrainReport local;
  local.bucket_samples.resize(B);

  std::vector<Eigen::MatrixXd> solved(B);
  for (std::size_t b = 0; b < B; ++b) {
    local.bucket_samples[b] = stats[b].count;
    if (stats[b].count == 0) {
      local.empty_buckets.push_back(b);
      // Identity on the x_t block: eps_hat = x_t, a serviceable prior since
      // x_t approaches pure noise at large t.
      for (std::size_t i = 0; i < d; ++i)
        model.weights[b][i * 2 * d + i] = 1.0;
      solved[b] = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f),
                                        static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i)
        solved[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
      continue;
    }
    Eigen::MatrixXd a = stats[b].gram.selfadjointView<Eigen::Lower>();
    a.diagonal().array() += config.ridge_lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    Eigen::MatrixXd w = ldlt.solve(stats[b].rhs);
    const double rhs_norm = std::max(stats[b].rhs.norm(), 1e-300);
    const double resid = (a * w - stats[b].rhs).norm() / rhs_norm;
    require(ldlt.info() == Eigen::Success && resid < 1e-6, ErrorKind::Numeric,
            "singular normal equations in bucket " + std::to_string(b) +
                " (residual " + std::to_string(resid) + "); increase ridge lambda");
    solved[b] = w;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < 2 * d; ++j)
        model.weights[b][i * 2 * d + j] =
            w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      model.biases[b][i] =
          w(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(i));
    }
  }

  double mse = 0.0;
  for (const auto& h : heldout) {
    const Eigen::VectorXd pred = solved[h.bucket].transpose() * h.features;
    mse += (pred - h.target).squaredNorm() / static_cast<double>(d);
  }
  local.heldout_count = heldout.size();
  local.heldout_mse = heldout.empty() ? 0.0 : mse / static_cast<double>(heldout.size());
  if (report) *report = local;
  return model;
}

GridD predict_eps(const PatchRegressor& model, const GridD& x_t_patch,
                  std::size_t t, const GridD& condition_patch) {
  const std::size_t ps = model.patch_size;
  require(x_t_patch.rows() == ps && x_t_patch.cols() == ps &&
              condition_patch.rows() == ps && condition_patch.cols() == ps,
          ErrorKind::Usage, "patch shapes must equal the model patch size");
  const std::size_t b = model.bucket_of(t);
  const std::size_t d = model.dim();
  const std::vector<double>& w = model.weights[b];
  const std::vector<double>& bias = model.biases[b];

  GridD out(ps, ps);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = bias[i];
    const double* row = w.data() + i * 2 * d;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * x_t_patch.storage()[j];
    for (std::size_t j = 0; j < d; ++j)
      acc += row[d + j] * condition_patch.storage()[j];
    require(std::isfinite(acc), ErrorKind::Numeric,
            "non-finite prediction in bucket " + std::to_string(b));
    out.storage()[i] = acc;
  }
  return out;
}

GridD PatchDenoiser::predict(const GridD& noisy, std::size_t t,
                             const GridD* condition) const {
  require(condition != nullptr, ErrorKind::Usage,
          "conditional denoiser requires a condition image");
  require(noisy.same_shape(*condition), ErrorKind::Usage,
          "condition shape must match the latent");
  const std::size_t ps = model_.patch_size;
  require(noisy.rows() >= ps && noisy.cols() >= ps, ErrorKind::Usage,
          "input smaller than the model patch size");

  // Half-patch stride: overlapping predictions are averaged, which avoids
  // imprinting a fixed block grid on the sample at every step.
  const std::size_t step = std::max<std::size_t>(1, ps / 2);
  auto offsets = [&](std::size_t dim) {
    std::vector<std::size_t> out;
    for (std::size_t o = 0; o + ps <= dim; o += step) out.push_back(o);
    if (out.back() != dim - ps) out.push_back(dim - ps);
    return out;
  };
  const auto row_off = offsets(noisy.rows());
  const auto col_off = offsets(noisy.cols());

  GridD sum(noisy.rows(), noisy.cols());
  GridD cnt(noisy.rows(), noisy.cols());
  GridD xp(ps, ps), cp(ps, ps);
  for (const std::size_t r0 : row_off)
    for (const std::size_t c0 : col_off) {
      for (std::size_t r = 0; r < ps; ++r)
        for (std::size_t c = 0; c < ps; ++c) {
          xp(r, c) = noisy(r0 + r, c0 + c);
          cp(r, c) = (*condition)(r0 + r, c0 + c);
        }
      const GridD pred = predict_eps(model_, xp, t, cp);
      for (std::size_t r = 0; r < ps; ++r)
        for (std::size_t c = 0; c < ps; ++c) {
          sum(r0 + r, c0 + c) += pred(r, c);
          cnt(r0 + r, c0 + c) += 1.0;
        }
    }
  for (std::size_t i = 0; i < sum.size(); ++i)
    sum.storage()[i] /= cnt.storage()[i];
  return sum;
}

namespace {

constexpr char kModelMagic[4] = {'S', 'A', 'R', 'M'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return std::bit_cast<double>(v);
}

}  // namespace

void save_model(const PatchRegressor& model, const std::string& path) {
  const std::size_t d = model.dim();
  std::string out;
  out.append(kModelMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(model.patch_size));
  put_u32(out, static_cast<std::uint32_t>(model.bucket_count));
  put_u32(out, static_cast<std::uint32_t>(model.total_steps));
  put_f64(out, model.ridge_lambda);
  for (std::size_t b = 0; b < model.bucket_count; ++b) {
    for (double v : model.weights[b]) put_f64(out, v);
    for (double v : model.biases[b]) put_f64(out, v);
  }
  const std::size_t expect =
      24 + model.bucket_count * (d * 2 * d + d) * 8;
  require(out.size() == expect, ErrorKind::Numeric, "model serialization bug");
  write_file_atomic(path, out);
}

PatchRegressor load_model(const std::string& path) {
  const std::string bytes = read_file(path, ErrorKind::Data);
  require(bytes.size() >= 24, ErrorKind::Data,
          path + ": truncated payload (shorter than the 24-byte header)");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  require(std::memcmp(p, kModelMagic, 4) == 0, ErrorKind::Data,
          path + ": bad magic (not a SARM model)");

  PatchRegressor m;
  m.patch_size = get_u32(p + 4);
  m.bucket_count = get_u32(p + 8);
  m.total_steps = get_u32(p + 12);
  m.ridge_lambda = get_f64(p + 16);
  require(m.patch_size >= 1 && m.bucket_count >= 1 && m.total_steps >= 1,
          ErrorKind::Data, path + ": degenerate header fields");

  const std::size_t d = m.dim();
  const std::size_t per_bucket = (d * 2 * d + d) * 8;
  require(bytes.size() - 24 == m.bucket_count * per_bucket, ErrorKind::Data,
          path + ": truncated payload (" + std::to_string(bytes.size() - 24) +
              " bytes after header, expected " +
              std::to_string(m.bucket_count * per_bucket) + ")");

  const unsigned char* q = p + 24;
  m.weights.assign(m.bucket_count, std::vector<double>(d * 2 * d));
  m.biases.assign(m.bucket_count, std::vector<double>(d));
  for (std::size_t b = 0; b < m.bucket_count; ++b) {
    for (auto& v : m.weights[b]) {
      v = get_f64(q);
      q += 8;
    }
    for (auto& v : m.biases[b]) {
      v = get_f64(q);
      q += 8;
    }
  }
  for (std::size_t b = 0; b < m.bucket_count; ++b) {
    for (double v : m.weights[b])
      require(std::isfinite(v), ErrorKind::Data, path + ": non-finite weight");
    for (double v : m.biases[b])
      require(std::isfinite(v), ErrorKind::Data, path + ": non-finite bias");
  }
  return m;
}

}  // namespace sarcs
