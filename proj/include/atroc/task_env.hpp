#ifndef ATROC_TASK_ENV_HPP
#define ATROC_TASK_ENV_HPP

#include "atroc/neural.hpp"
#include "atroc/rng.hpp"
#include "atroc/types.hpp"

#include <cstdint>
#include <string>

namespace atroc {

/// Synthetic inference environment: inputs carry a task-relevant block
/// driven by hidden factors t plus a task-agnostic clutter block, and the
/// action is a bounded function of t alone. Everything is a function of the
/// seed.
struct DatasetSpec {
    std::uint64_t seed = 1;
    int n_train = 4096;
    int n_test = 512;
    int l = 64;           // input dim
    int d = 4;            // action dim
    int latent_dim = 4;   // hidden task factors
    double clutter_ratio = 0.5;
    double noise_std = 0.01;

    int clutter_dim() const { return static_cast<int>(clutter_ratio * l); }
    int task_dim() const { return l - clutter_dim(); }
};

bool operator==(const DatasetSpec& a, const DatasetSpec& b);

struct Dataset {
    DatasetSpec spec;
    Mat x_train; // l x n_train
    Mat a_train; // d x n_train
    Mat x_test;  // l x n_test
    Mat a_test;  // d x n_test
};

/// t ~ N(0, I); x = [A t ; clutter] + noise; a = tanh(B t). A and B are
/// fixed matrices drawn first from the seed, so train/test are disjoint by
/// construction and bit-identical across runs.
Dataset generate_dataset(const DatasetSpec& spec);

/// Versioned binary container (magic + format version + 64-bit LE arrays).
/// The file is a cache: the dataset regenerates from the spec alone.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

struct AgentSchedule {
    int hidden = 128;
    int steps = 4000;
    int batch = 64;
    double lr = 1e-3;
    double mse_threshold = 0.01; // abort gate on test MSE
    std::uint64_t seed = 0;      // parameter + batch-sampling seed
};

/// Trains the stand-in inference agent on clean x -> a and freezes it.
/// Throws NumericalError when the test-MSE gate is missed.
Mlp pretrain_agent(const Dataset& ds, const AgentSchedule& sched);

/// Deterministic forward pass of the frozen agent. Throws
/// std::invalid_argument when y does not have the input-data shape -- the
/// compatibility failure the aligned framework exists to prevent.
Vec agent_infer(const Mlp& agent, const Eigen::Ref<const Vec>& y);
Mat agent_infer(const Mlp& agent, const Mat& y);

/// The frozen agent's loss, standing in for the edge agent's objective:
/// exactly neg_log_gauss(a, a_hat, sigma_c).
double agent_loss(const Eigen::Ref<const Vec>& a,
                  const Eigen::Ref<const Vec>& a_hat, double sigma_c);

double mean_squared_error(const Mat& pred, const Mat& target);

} // namespace atroc

#endif // ATROC_TASK_ENV_HPP
