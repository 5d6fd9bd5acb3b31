#include "atroc/task_env.hpp"

#include "atroc/errors.hpp"
#include "atroc/objectives.hpp"
#include "atroc/serialize.hpp"

#include <cmath>
#include <stdexcept>

namespace atroc {

namespace {

constexpr char kDatasetMagic[9] = "ATROCDS\x01";
constexpr std::uint32_t kDatasetVersion = 1;

void fill_standard_normal(Mat& m, RandomStream& rng) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) rng.fill_normal(m.col(c));
}

void generate_split(Mat& x, Mat& a, const DatasetSpec& spec, const Mat& task_map,
                    const Mat& action_map, RandomStream& rng) {
    const int task = spec.task_dim();
    const int clutter = spec.clutter_dim();
    Vec t(spec.latent_dim);
    Vec noise(spec.l);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        rng.fill_normal(t);
        x.col(i).head(task) = task_map * t;
        if (clutter > 0) rng.fill_normal(x.col(i).tail(clutter));
        rng.fill_normal(noise);
        x.col(i) += spec.noise_std * noise;
        a.col(i) = (action_map * t).array().tanh();
    }
}

} // namespace

bool operator==(const DatasetSpec& a, const DatasetSpec& b) {
    return a.seed == b.seed && a.n_train == b.n_train && a.n_test == b.n_test &&
           a.l == b.l && a.d == b.d && a.latent_dim == b.latent_dim &&
           a.clutter_ratio == b.clutter_ratio && a.noise_std == b.noise_std;
}

Dataset generate_dataset(const DatasetSpec& spec) {
    if (spec.latent_dim > spec.d || spec.d > spec.l) {
        throw std::invalid_argument("generate_dataset: need latent_dim <= d <= l");
    }
    if (spec.clutter_ratio < 0.0 || spec.clutter_ratio >= 1.0) {
        throw std::invalid_argument("generate_dataset: clutter_ratio in [0, 1)");
    }
    if (spec.task_dim() < spec.latent_dim) {
        throw std::invalid_argument(
            "generate_dataset: task block smaller than latent_dim");
    }
    Dataset ds;
    ds.spec = spec;

    RandomStream rng(derive_seed(spec.seed, 0x5EED));
    // Fixed generator matrices come first so the splits that follow are
    // disjoint draws from the same stream. The action map is scaled to keep
    // B*t inside tanh's near-linear range (std 0.5 per row).
    Mat task_map(spec.task_dim(), spec.latent_dim);
    fill_standard_normal(task_map, rng);
    task_map /= std::sqrt(static_cast<double>(spec.latent_dim));
    Mat action_map(spec.d, spec.latent_dim);
    fill_standard_normal(action_map, rng);
    action_map *= 0.5 / std::sqrt(static_cast<double>(spec.latent_dim));

    ds.x_train.resize(spec.l, spec.n_train);
    ds.a_train.resize(spec.d, spec.n_train);
    ds.x_test.resize(spec.l, spec.n_test);
    ds.a_test.resize(spec.d, spec.n_test);
    generate_split(ds.x_train, ds.a_train, spec, task_map, action_map, rng);
    generate_split(ds.x_test, ds.a_test, spec, task_map, action_map, rng);
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    BinaryWriter w(path);
    w.magic(kDatasetMagic);
    w.u32(kDatasetVersion);
    w.u64(ds.spec.seed);
    w.i64(ds.spec.n_train);
    w.i64(ds.spec.n_test);
    w.i64(ds.spec.l);
    w.i64(ds.spec.d);
    w.i64(ds.spec.latent_dim);
    w.f64(ds.spec.clutter_ratio);
    w.f64(ds.spec.noise_std);
    w.mat(ds.x_train);
    w.mat(ds.a_train);
    w.mat(ds.x_test);
    w.mat(ds.a_test);
    if (!w.good()) throw std::runtime_error("save_dataset: write failed");
}

Dataset load_dataset(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic(kDatasetMagic);
    if (r.u32() != kDatasetVersion) {
        throw std::runtime_error("load_dataset: unsupported version");
    }
    Dataset ds;
    ds.spec.seed = r.u64();
    ds.spec.n_train = static_cast<int>(r.i64());
    ds.spec.n_test = static_cast<int>(r.i64());
    ds.spec.l = static_cast<int>(r.i64());
    ds.spec.d = static_cast<int>(r.i64());
    ds.spec.latent_dim = static_cast<int>(r.i64());
    ds.spec.clutter_ratio = r.f64();
    ds.spec.noise_std = r.f64();
    ds.x_train = r.mat();
    ds.a_train = r.mat();
    ds.x_test = r.mat();
    ds.a_test = r.mat();
    return ds;
}

double mean_squared_error(const Mat& pred, const Mat& target) {
    return (pred - target).squaredNorm() / static_cast<double>(target.size());
}

Mlp pretrain_agent(const Dataset& ds, const AgentSchedule& sched) {
    const NetworkSpec spec = NetworkSpec::mlp(
        {ds.spec.l, sched.hidden, ds.spec.d}, Activation::leaky_relu,
        derive_seed(sched.seed, 0xA6E7));
    Mlp agent = make_mlp(spec);

    AdamState adam;
    adam.init_like(agent);
    MlpGrads grads;
    grads.init_like(agent);
    RandomStream batch_rng(derive_seed(sched.seed, 0xBA7C));

    const int n = ds.spec.n_train;
    Mat xb(ds.spec.l, sched.batch);
    Mat ab(ds.spec.d, sched.batch);
    for (int step = 0; step < sched.steps; ++step) {
        for (int i = 0; i < sched.batch; ++i) {
            const auto idx =
                static_cast<Eigen::Index>(batch_rng.uniform() * n);
            xb.col(i) = ds.x_train.col(idx);
            ab.col(i) = ds.a_train.col(idx);
        }
        MlpCache cache;
        const Mat pred = forward(agent, xb, cache);
        const Mat d_pred =
            (2.0 / static_cast<double>(pred.size())) * (pred - ab);
        grads.set_zero();
        backward(agent, d_pred, cache, &grads);
        adam_step(agent, grads, adam, {sched.lr});
    }

    MlpCache cache;
    const double test_mse =
        mean_squared_error(forward(agent, ds.x_test, cache), ds.a_test);
    if (!(test_mse < sched.mse_threshold)) {
        throw NumericalError("pretrain_agent: test MSE " +
                             std::to_string(test_mse) + " missed the gate " +
                             std::to_string(sched.mse_threshold));
    }
    return agent;
}

Vec agent_infer(const Mlp& agent, const Eigen::Ref<const Vec>& y) {
    MlpCache cache;
    return forward(agent, y, cache);
}

Mat agent_infer(const Mlp& agent, const Mat& y) {
    MlpCache cache;
    return forward(agent, y, cache);
}

double agent_loss(const Eigen::Ref<const Vec>& a,
                  const Eigen::Ref<const Vec>& a_hat, double sigma_c) {
    return neg_log_gauss(a, a_hat, sigma_c);
}

} // namespace atroc
