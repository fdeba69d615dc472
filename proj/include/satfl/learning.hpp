#pragma once

// Desk-scale learners for the on-board training step: a pluggable model
// interface, mini-batch SGD, the linear compute-time model, label-skewed
// partitioning and a synthetic Gaussian-blob classification task.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace satfl::learning {

struct ModelParams {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
    // S(w): parameters are shipped as 32-bit floats.
    double wire_bits() const { return 32.0 * static_cast<double>(values.size()); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Row-major feature matrix plus labels. sample_ids track where each row came
// from in the dataset it was split off.
struct Dataset {
    int feature_dim = 0;
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<std::size_t> sample_ids;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * static_cast<std::size_t>(feature_dim), static_cast<std::size_t>(feature_dim)};
    }
    void push(std::span<const double> x, int label, std::size_t id);
    // Bits occupied by the raw samples, S(D_k).
    double data_bits() const { return 32.0 * static_cast<double>(features.size()); }
};

using LocalDataset = Dataset;

class Learner {
public:
    virtual ~Learner() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual int class_count() const = 0;

    // Mean per-sample loss over the selected rows; when grad is non-empty it
    // receives the gradient of that mean (overwritten, not accumulated).
    virtual double loss_and_gradient(std::span<const double> params, const Dataset& data,
                                     std::span<const std::size_t> rows, std::span<double> grad) const = 0;

    virtual int predict(std::span<const double> params, std::span<const double> x) const = 0;

    virtual ModelParams initial_params(std::uint64_t seed) const = 0;
};

// Multinomial logistic regression: W (C x F) then bias (C).
class SoftmaxRegression final : public Learner {
public:
    SoftmaxRegression(int classes, int feature_dim);

    std::string kind() const override { return "logreg"; }
    std::size_t dimension() const override;
    int class_count() const override { return classes_; }
    double loss_and_gradient(std::span<const double> params, const Dataset& data, std::span<const std::size_t> rows,
                             std::span<double> grad) const override;
    int predict(std::span<const double> params, std::span<const double> x) const override;
    ModelParams initial_params(std::uint64_t seed) const override;

private:
    int classes_;
    int feature_dim_;
};

// One tanh hidden layer and a softmax output: W1 (H x F), b1 (H), W2 (C x H), b2 (C).
class MlpClassifier final : public Learner {
public:
    MlpClassifier(int classes, int feature_dim, int hidden);

    std::string kind() const override { return "mlp"; }
    std::size_t dimension() const override;
    int class_count() const override { return classes_; }
    double loss_and_gradient(std::span<const double> params, const Dataset& data, std::span<const std::size_t> rows,
                             std::span<double> grad) const override;
    int predict(std::span<const double> params, std::span<const double> x) const override;
    ModelParams initial_params(std::uint64_t seed) const override;

private:
    void forward(std::span<const double> params, std::span<const double> x, std::span<double> hidden,
                 std::span<double> logits) const;

    int classes_;
    int feature_dim_;
    int hidden_;
};

std::unique_ptr<Learner> make_learner(const std::string& kind, int classes, int feature_dim, int hidden);

// F_k(w) = (1/D_k) sum f(x, w). Throws DomainError on an empty dataset.
double local_loss(const Learner& learner, const ModelParams& params, const Dataset& data);

// F(w) = sum (D_k / D) F_k(w).
double global_loss(const Learner& learner, const ModelParams& params, std::span<const Dataset> datasets);

struct SgdConfig {
    double eta = 0.1;
    int batch_size = 10;
    int iterations = 1;  // mini-batch steps, I
};

// Number of mini-batch steps that make up `epochs` passes over `samples`.
int steps_per_epochs(std::size_t samples, int batch_size, int epochs);

// I steps of w <- w - eta * grad F_k(w) over mini-batches taken from a
// seeded per-epoch shuffle of the local rows.
ModelParams local_sgd(const Learner& learner, const ModelParams& start, const Dataset& data, const SgdConfig& config,
                      std::uint64_t seed);

struct ComputeProfile {
    double cycles_per_bit = 0.0;  // c_k
    double cpu_hz = 0.0;          // nu_k
    int iterations = 1;           // I
};

// t_l = c_k * I * S(D_k) / nu_k
double training_time(const ComputeProfile& profile, double data_bits);

// Splits `dataset` so that group g's satellites hold only the g-th block of
// class_count / groups.size() labels, each label spread evenly across the
// group's members. groups[g] lists satellite ids; the result is indexed by
// satellite id and covers 0..max id.
std::vector<Dataset> partition_non_iid(const Dataset& dataset, std::span<const std::vector<int>> groups,
                                       int class_count, std::uint64_t seed);

// Fraction of argmax-correct predictions.
double evaluate_accuracy(const Learner& learner, const ModelParams& params, const Dataset& test);

struct TaskSpec {
    int classes = 10;
    int feature_dim = 16;
    int samples_per_class = 400;
    int test_per_class = 100;
    double spread = 1.0;  // per-feature std-dev of each blob around its centre
    std::uint64_t seed = 1;
};

struct SyntheticTask {
    Dataset train;
    Dataset test;
};

// Gaussian blobs: class centres have standard-normal coordinates, samples add
// N(0, spread^2) noise per feature. Smaller spread means a wider margin.
SyntheticTask generate_synthetic_task(const TaskSpec& spec);

}  // namespace satfl::learning
