#include "sypa/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sypa/error.hpp"

namespace sypa {

void to_json(nlohmann::json& j, const TrainSchedule& s) {
  nlohmann::json lrs = nlohmann::json::array();
  for (const auto& [it, lr] : s.lr_schedule) lrs.push_back({it, lr});
  j = nlohmann::json{{"iterations", s.iterations},
                     {"batch", s.batch},
                     {"lr_schedule", lrs},
                     {"log_every", s.log_every},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, TrainSchedule& s) {
  s.iterations = j.at("iterations").get<std::int64_t>();
  s.batch = j.at("batch").get<int>();
  s.lr_schedule.clear();
  for (const auto& row : j.at("lr_schedule"))
    s.lr_schedule.emplace_back(row.at(0).get<std::int64_t>(), row.at(1).get<double>());
  s.log_every = j.at("log_every").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
}

void validate_schedule(const TrainSchedule& s) {
  if (s.iterations < 0) fail("bad params", "iteration count must be non-negative");
  if (s.batch < 1) fail("bad params", "batch size must be positive");
  if (s.log_every < 1) fail("bad params", "log_every must be positive");
  if (s.lr_schedule.empty() || s.lr_schedule.front().first != 0)
    fail("bad params", "lr schedule must start at iteration 0");
  for (std::size_t i = 1; i < s.lr_schedule.size(); ++i)
    if (s.lr_schedule[i].first <= s.lr_schedule[i - 1].first)
      fail("bad params", "lr schedule breakpoints must strictly increase");
  for (const auto& [it, lr] : s.lr_schedule)
    if (!(lr > 0.0)) fail("bad params", "learning rates must be positive");
}

double lr_at(const TrainSchedule& s, std::int64_t iteration) {
  double lr = s.lr_schedule.front().second;
  for (const auto& [it, value] : s.lr_schedule) {
    if (it <= iteration) lr = value;
  }
  return lr;
}

namespace {

double example_loss(UNet<float>& net, const TrainingExample& ex, LossKind kind,
                    Tensor<float>& grad) {
  const Tensor<float>& out = net.forward(ex.input);
  switch (kind) {
    case LossKind::dense_bce:
      return bce_with_logits(out, ex.target, grad);
    case LossKind::pooled_bce:
      if (ex.target.size() != 1) fail("shape mismatch", "pooled loss needs a scalar label");
      return pooled_bce_with_logits(out, static_cast<double>(ex.target.data[0]), grad);
    case LossKind::signed_bce:
      return signed_bce_with_logits(out, ex.target, grad);
  }
  fail("bad params", "unknown loss kind");
}

void adam_step(UNet<float>& net, AdamState& adam, double lr, double inv_batch) {
  ++adam.t;
  const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.t));
  const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.t));
  for (ParamBlock<float>* p : net.params()) {
    for (std::size_t i = 0; i < p->w.size(); ++i) {
      const double g = static_cast<double>(p->g[i]) * inv_batch;
      const double m = adam.beta1 * p->m[i] + (1.0 - adam.beta1) * g;
      const double v = adam.beta2 * p->v[i] + (1.0 - adam.beta2) * g * g;
      p->m[i] = static_cast<float>(m);
      p->v[i] = static_cast<float>(v);
      p->w[i] -= static_cast<float>(lr * (m / bc1) / (std::sqrt(v / bc2) + adam.eps));
    }
  }
}

}  // namespace

TrainResult train(UNet<float>& net, ExampleSampler& sampler, const TrainSchedule& schedule,
                  LossKind kind, AdamState& adam, Rng& rng,
                  std::int64_t start_iteration) {
  validate_schedule(schedule);
  TrainResult result;
  Tensor<float> grad;
  const double inv_batch = 1.0 / static_cast<double>(schedule.batch);

  for (std::int64_t step = 1; step <= schedule.iterations; ++step) {
    const std::int64_t iteration = start_iteration + step;
    net.zero_grad();
    double batch_loss = 0.0;
    for (int b = 0; b < schedule.batch; ++b) {
      const TrainingExample ex = sampler.next(rng);
      batch_loss += example_loss(net, ex, kind, grad);
      net.backward(ex.input, grad);
    }
    batch_loss *= inv_batch;
    if (!std::isfinite(batch_loss))
      fail("non-finite loss", "aborted at iteration " + std::to_string(iteration));
    const double lr = lr_at(schedule, iteration - 1);
    adam_step(net, adam, lr, inv_batch);
    if (iteration % schedule.log_every == 0 || step == schedule.iterations)
      result.log.push_back(LossLogRow{iteration, batch_loss, lr});
    ++result.iterations_run;
  }
  return result;
}

void write_loss_log(const std::filesystem::path& path, const std::vector<LossLogRow>& rows,
                    bool append) {
  const bool exists = std::filesystem::exists(path);
  std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
  if (!f) fail("io", "cannot write loss log: " + path.string());
  if (!append || !exists) f << "iteration,loss,lr\n";
  f.precision(17);
  for (const LossLogRow& r : rows) f << r.iteration << ',' << r.loss << ',' << r.lr << '\n';
  if (!f) fail("io", "failed writing loss log: " + path.string());
}

std::vector<LossLogRow> read_loss_log(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot read loss log: " + path.string());
  std::vector<LossLogRow> rows;
  std::string line;
  if (!std::getline(f, line)) fail("io", "empty loss log: " + path.string());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    LossLogRow r;
    char comma = 0;
    if (!(ss >> r.iteration >> comma >> r.loss >> comma >> r.lr))
      fail("io", "malformed loss log row: " + line);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sypa
