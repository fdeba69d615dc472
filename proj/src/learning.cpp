#include "satfl/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "satfl/error.hpp"

namespace satfl::learning {

namespace {

// Softmax of logits in place; returns log-sum-exp.
double softmax_inplace(std::span<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return zmax + std::log(sum);
}

void check_dims(const Learner& learner, std::span<const double> params, std::span<const double> grad) {
    if (params.size() != learner.dimension()) throw DomainError("parameter dimension mismatch");
    if (!grad.empty() && grad.size() != learner.dimension()) throw DomainError("gradient dimension mismatch");
}

ModelParams small_normal(std::size_t n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    ModelParams p;
    p.values.resize(n);
    for (double& v : p.values) v = normal(rng);
    return p;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

}  // namespace

void Dataset::push(std::span<const double> x, int label, std::size_t id) {
    if (static_cast<int>(x.size()) != feature_dim) throw DomainError("feature dimension mismatch");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
    sample_ids.push_back(id);
}

// ---------------------------------------------------------------------------
// SoftmaxRegression

SoftmaxRegression::SoftmaxRegression(int classes, int feature_dim) : classes_(classes), feature_dim_(feature_dim) {
    if (classes < 2 || feature_dim < 1) throw DomainError("softmax regression needs >= 2 classes and >= 1 feature");
}

std::size_t SoftmaxRegression::dimension() const {
    return static_cast<std::size_t>(classes_) * static_cast<std::size_t>(feature_dim_ + 1);
}

double SoftmaxRegression::loss_and_gradient(std::span<const double> params, const Dataset& data,
                                            std::span<const std::size_t> rows, std::span<double> grad) const {
    check_dims(*this, params, grad);
    if (rows.empty()) throw DomainError("loss over an empty batch");
    if (data.feature_dim != feature_dim_) throw DomainError("dataset feature dimension mismatch");

    const std::size_t C = classes_, F = feature_dim_;
    const double* W = params.data();
    const double* b = params.data() + C * F;
    std::fill(grad.begin(), grad.end(), 0.0);

    std::vector<double> z(C);
    double total = 0.0;
    for (std::size_t r : rows) {
        const auto x = data.row(r);
        const auto y = static_cast<std::size_t>(data.labels[r]);
        for (std::size_t c = 0; c < C; ++c) {
            double s = b[c];
            for (std::size_t f = 0; f < F; ++f) s += W[c * F + f] * x[f];
            z[c] = s;
        }
        const double zy = z[y];
        total += softmax_inplace(z) - zy;
        if (!grad.empty()) {
            for (std::size_t c = 0; c < C; ++c) {
                const double d = z[c] - (c == y ? 1.0 : 0.0);
                for (std::size_t f = 0; f < F; ++f) grad[c * F + f] += d * x[f];
                grad[C * F + c] += d;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (double& g : grad) g *= inv;
    return total * inv;
}

int SoftmaxRegression::predict(std::span<const double> params, std::span<const double> x) const {
    const std::size_t C = classes_, F = feature_dim_;
    int best = 0;
    double best_score = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        double s = params[C * F + c];
        for (std::size_t f = 0; f < F; ++f) s += params[c * F + f] * x[f];
        if (c == 0 || s > best_score) {
            best = static_cast<int>(c);
            best_score = s;
        }
    }
    return best;
}

ModelParams SoftmaxRegression::initial_params(std::uint64_t seed) const { return small_normal(dimension(), seed, 0.01); }

// ---------------------------------------------------------------------------
// MlpClassifier

MlpClassifier::MlpClassifier(int classes, int feature_dim, int hidden)
    : classes_(classes), feature_dim_(feature_dim), hidden_(hidden) {
    if (classes < 2 || feature_dim < 1 || hidden < 1) throw DomainError("invalid MLP shape");
}

std::size_t MlpClassifier::dimension() const {
    const std::size_t C = classes_, F = feature_dim_, H = hidden_;
    return H * F + H + C * H + C;
}

void MlpClassifier::forward(std::span<const double> params, std::span<const double> x, std::span<double> hidden,
                            std::span<double> logits) const {
    const std::size_t C = classes_, F = feature_dim_, H = hidden_;
    const double* W1 = params.data();
    const double* b1 = W1 + H * F;
    const double* W2 = b1 + H;
    const double* b2 = W2 + C * H;
    for (std::size_t h = 0; h < H; ++h) {
        double s = b1[h];
        for (std::size_t f = 0; f < F; ++f) s += W1[h * F + f] * x[f];
        hidden[h] = std::tanh(s);
    }
    for (std::size_t c = 0; c < C; ++c) {
        double s = b2[c];
        for (std::size_t h = 0; h < H; ++h) s += W2[c * H + h] * hidden[h];
        logits[c] = s;
    }
}

double MlpClassifier::loss_and_gradient(std::span<const double> params, const Dataset& data,
                                        std::span<const std::size_t> rows, std::span<double> grad) const {
    check_dims(*this, params, grad);
    if (rows.empty()) throw DomainError("loss over an empty batch");
    if (data.feature_dim != feature_dim_) throw DomainError("dataset feature dimension mismatch");

    const std::size_t C = classes_, F = feature_dim_, H = hidden_;
    const double* W2 = params.data() + H * F + H;
    std::fill(grad.begin(), grad.end(), 0.0);
    double* gW1 = grad.empty() ? nullptr : grad.data();
    double* gb1 = gW1 ? gW1 + H * F : nullptr;
    double* gW2 = gW1 ? gb1 + H : nullptr;
    double* gb2 = gW1 ? gW2 + C * H : nullptr;

    std::vector<double> hid(H), z(C), dh(H);
    double total = 0.0;
    for (std::size_t r : rows) {
        const auto x = data.row(r);
        const auto y = static_cast<std::size_t>(data.labels[r]);
        forward(params, x, hid, z);
        const double zy = z[y];
        total += softmax_inplace(z) - zy;
        if (!gW1) continue;

        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            const double d = z[c] - (c == y ? 1.0 : 0.0);
            for (std::size_t h = 0; h < H; ++h) {
                gW2[c * H + h] += d * hid[h];
                dh[h] += d * W2[c * H + h];
            }
            gb2[c] += d;
        }
        for (std::size_t h = 0; h < H; ++h) {
            const double da = dh[h] * (1.0 - hid[h] * hid[h]);
            for (std::size_t f = 0; f < F; ++f) gW1[h * F + f] += da * x[f];
            gb1[h] += da;
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (double& g : grad) g *= inv;
    return total * inv;
}

int MlpClassifier::predict(std::span<const double> params, std::span<const double> x) const {
    std::vector<double> hid(hidden_), z(classes_);
    forward(params, x, hid, z);
    return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

ModelParams MlpClassifier::initial_params(std::uint64_t seed) const {
    // Hidden layer needs symmetry breaking; scale ~ 1/sqrt(fan_in).
    auto p = small_normal(dimension(), seed, 1.0 / std::sqrt(static_cast<double>(feature_dim_)));
    const std::size_t H = hidden_, F = feature_dim_;
    std::fill(p.values.begin() + static_cast<std::ptrdiff_t>(H * F), p.values.begin() + static_cast<std::ptrdiff_t>(H * F + H), 0.0);
    return p;
}

std::unique_ptr<Learner> make_learner(const std::string& kind, int classes, int feature_dim, int hidden) {
    if (kind == "logreg") return std::make_unique<SoftmaxRegression>(classes, feature_dim);
    if (kind == "mlp") return std::make_unique<MlpClassifier>(classes, feature_dim, hidden);
    throw DomainError("unknown learner kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

double local_loss(const Learner& learner, const ModelParams& params, const Dataset& data) {
    if (data.empty()) throw DomainError("local loss of an empty dataset");
    const auto rows = all_rows(data.size());
    return learner.loss_and_gradient(params.values, data, rows, {});
}

double global_loss(const Learner& learner, const ModelParams& params, std::span<const Dataset> datasets) {
    std::size_t total = 0;
    for (const auto& d : datasets) total += d.size();
    if (datasets.empty() || total == 0) throw DomainError("global loss needs at least one non-empty dataset");
    double sum = 0.0;
    for (const auto& d : datasets) {
        if (d.empty()) continue;
        sum += static_cast<double>(d.size()) / static_cast<double>(total) * local_loss(learner, params, d);
    }
    return sum;
}

int steps_per_epochs(std::size_t samples, int batch_size, int epochs) {
    if (batch_size < 1 || epochs < 1) throw DomainError("batch size and epochs must be positive");
    const auto per_epoch = (samples + static_cast<std::size_t>(batch_size) - 1) / static_cast<std::size_t>(batch_size);
    return static_cast<int>(std::max<std::size_t>(1, per_epoch)) * epochs;
}

ModelParams local_sgd(const Learner& learner, const ModelParams& start, const Dataset& data, const SgdConfig& config,
                      std::uint64_t seed) {
    if (start.dimension() != learner.dimension()) throw DomainError("start parameters have the wrong dimension");
    if (data.empty()) throw DomainError("local SGD on an empty dataset");
    if (config.batch_size < 1 || config.iterations < 0 || !(config.eta > 0.0)) {
        throw DomainError("invalid SGD configuration");
    }

    ModelParams w = start;
    std::vector<double> grad(w.dimension());
    std::mt19937_64 rng(seed);
    auto order = all_rows(data.size());
    std::size_t cursor = order.size();  // forces a shuffle before the first step

    for (int it = 0; it < config.iterations; ++it) {
        if (cursor >= order.size()) {
            std::shuffle(order.begin(), order.end(), rng);
            cursor = 0;
        }
        const std::size_t n = std::min(static_cast<std::size_t>(config.batch_size), order.size() - cursor);
        learner.loss_and_gradient(w.values, data, std::span(order).subspan(cursor, n), grad);
        cursor += n;
        for (std::size_t i = 0; i < grad.size(); ++i) w.values[i] -= config.eta * grad[i];
    }
    return w;
}

double training_time(const ComputeProfile& profile, double data_bits) {
    if (!(profile.cycles_per_bit > 0.0 && profile.cpu_hz > 0.0 && profile.iterations > 0 && data_bits > 0.0)) {
        throw DomainError("training time needs positive c_k, nu_k, I and S(D_k)");
    }
    return profile.cycles_per_bit * static_cast<double>(profile.iterations) * data_bits / profile.cpu_hz;
}

std::vector<Dataset> partition_non_iid(const Dataset& dataset, std::span<const std::vector<int>> groups,
                                       int class_count, std::uint64_t seed) {
    if (groups.empty()) throw DomainError("partition needs at least one group");
    if (class_count < 1 || class_count % static_cast<int>(groups.size()) != 0) {
        throw DomainError("class count " + std::to_string(class_count) + " does not divide across " +
                          std::to_string(groups.size()) + " groups");
    }

    std::set<int> seen;
    int max_id = -1;
    for (const auto& g : groups) {
        if (g.empty()) throw DomainError("partition group without satellites");
        for (int id : g) {
            if (id < 0 || !seen.insert(id).second) throw DomainError("satellite ids must be unique and non-negative");
            max_id = std::max(max_id, id);
        }
    }
    if (static_cast<int>(seen.size()) != max_id + 1) throw DomainError("partition groups must cover ids 0..K-1");

    std::vector<std::vector<std::size_t>> by_label(static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const int y = dataset.labels[i];
        if (y < 0 || y >= class_count) throw DomainError("label outside the class range");
        by_label[static_cast<std::size_t>(y)].push_back(i);
    }

    std::vector<std::vector<std::size_t>> assigned(static_cast<std::size_t>(max_id + 1));
    std::mt19937_64 rng(seed);
    const int labels_per_group = class_count / static_cast<int>(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& members = groups[g];
        for (int l = 0; l < labels_per_group; ++l) {
            auto idx = by_label[g * static_cast<std::size_t>(labels_per_group) + static_cast<std::size_t>(l)];
            if (idx.size() < members.size()) {
                throw DomainError("label " + std::to_string(g * labels_per_group + l) + " has " +
                                  std::to_string(idx.size()) + " samples for " + std::to_string(members.size()) +
                                  " satellites");
            }
            std::shuffle(idx.begin(), idx.end(), rng);
            const std::size_t m = members.size();
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t lo = j * idx.size() / m, hi = (j + 1) * idx.size() / m;
                auto& dst = assigned[static_cast<std::size_t>(members[j])];
                dst.insert(dst.end(), idx.begin() + static_cast<std::ptrdiff_t>(lo),
                           idx.begin() + static_cast<std::ptrdiff_t>(hi));
            }
        }
    }

    std::vector<Dataset> out(assigned.size());
    for (std::size_t k = 0; k < assigned.size(); ++k) {
        auto& rows = assigned[k];
        std::sort(rows.begin(), rows.end());
        out[k].feature_dim = dataset.feature_dim;
        for (std::size_t r : rows) out[k].push(dataset.row(r), dataset.labels[r], dataset.sample_ids[r]);
    }
    return out;
}

double evaluate_accuracy(const Learner& learner, const ModelParams& params, const Dataset& test) {
    if (test.empty()) throw DomainError("accuracy on an empty test set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (learner.predict(params.values, test.row(i)) == test.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

SyntheticTask generate_synthetic_task(const TaskSpec& spec) {
    if (spec.classes < 2 || spec.feature_dim < 1 || spec.samples_per_class < 1 || spec.test_per_class < 1 ||
        spec.spread < 0.0) {
        throw DomainError("invalid synthetic task specification");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto F = static_cast<std::size_t>(spec.feature_dim);
    std::vector<double> centres(static_cast<std::size_t>(spec.classes) * F);
    for (double& c : centres) c = normal(rng);

    SyntheticTask task;
    task.train.feature_dim = spec.feature_dim;
    task.test.feature_dim = spec.feature_dim;
    std::vector<double> x(F);
    std::size_t next_id = 0;
    auto draw = [&](Dataset& into, int count) {
        for (int c = 0; c < spec.classes; ++c) {
            for (int i = 0; i < count; ++i) {
                for (std::size_t f = 0; f < F; ++f) x[f] = centres[static_cast<std::size_t>(c) * F + f] + spec.spread * normal(rng);
                into.push(x, c, next_id++);
            }
        }
    };
    draw(task.train, spec.samples_per_class);
    draw(task.test, spec.test_per_class);
    return task;
}

}  // namespace satfl::learning
