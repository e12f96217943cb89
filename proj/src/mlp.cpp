#include "fedsac/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace fedsac {

template <typename T>
BasicMlp<T>::BasicMlp(std::vector<int> dims, std::mt19937_64& rng) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
    build_offsets();
    for (int l = 0; l < layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        const Eigen::Index n_w = static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1];
        for (Eigen::Index i = 0; i < n_w; ++i) params_[w_off_[l] + i] = static_cast<T>(u(rng));
        for (int i = 0; i < dims_[l + 1]; ++i) params_[b_off_[l] + i] = static_cast<T>(u(rng));
    }
}

template <typename T>
void BasicMlp<T>::build_offsets() {
    Eigen::Index off = 0;
    w_off_.clear();
    b_off_.clear();
    for (int l = 0; l < layers(); ++l) {
        w_off_.push_back(off);
        off += static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1];
        b_off_.push_back(off);
        off += dims_[l + 1];
    }
    params_ = Vector::Zero(off);
}

template <typename T>
Eigen::Map<const typename BasicMlp<T>::Matrix> BasicMlp<T>::weight(int l) const {
    return {params_.data() + w_off_[l], dims_[l + 1], dims_[l]};
}

template <typename T>
Eigen::Map<const typename BasicMlp<T>::Vector> BasicMlp<T>::bias(int l) const {
    return {params_.data() + b_off_[l], dims_[l + 1]};
}

template <typename T>
typename BasicMlp<T>::Matrix BasicMlp<T>::forward(const Matrix& x, Cache* cache) const {
    if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input has wrong row count");
    if (cache) {
        cache->acts.resize(layers() + 1);
        cache->acts[0] = x;
    }
    Matrix h = x;
    for (int l = 0; l < layers(); ++l) {
        Matrix z(dims_[l + 1], h.cols());
        z.noalias() = weight(l) * h;
        z.colwise() += bias(l);
        if (l + 1 < layers()) z = z.cwiseMax(T(0));
        h = std::move(z);
        if (cache) cache->acts[l + 1] = h;
    }
    return h;
}

template <typename T>
void BasicMlp<T>::backward(const Cache& cache, const Matrix& d_out, Vector* grad, Matrix* d_input) const {
    Matrix delta = d_out;
    for (int l = layers() - 1; l >= 0; --l) {
        const Matrix& in = cache.acts[l];
        if (grad) {
            Eigen::Map<Matrix> gw(grad->data() + w_off_[l], dims_[l + 1], dims_[l]);
            Eigen::Map<Vector> gb(grad->data() + b_off_[l], dims_[l + 1]);
            gw.noalias() += delta * in.transpose();
            gb += delta.rowwise().sum();
        }
        if (l == 0 && !d_input) break;
        Matrix prev(dims_[l], delta.cols());
        prev.noalias() = weight(l).transpose() * delta;
        if (l > 0) prev = (in.array() > T(0)).select(prev, T(0));
        delta = std::move(prev);
    }
    if (d_input) *d_input = std::move(delta);
}

template <typename T>
std::vector<bool> BasicMlp<T>::activation_pattern(const Matrix& x) const {
    Cache cache;
    forward(x, &cache);
    std::vector<bool> bits;
    for (int l = 1; l < layers(); ++l)
        for (Eigen::Index i = 0; i < cache.acts[l].size(); ++i) bits.push_back(cache.acts[l].data()[i] > T(0));
    return bits;
}

template <typename T>
BasicAdam<T>::BasicAdam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
    : m_(Vector::Zero(n)), v_(Vector::Zero(n)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

template <typename T>
void BasicAdam<T>::step(Eigen::Ref<Vector> params, const Vector& grad) {
    ++t_;
    const T b1 = static_cast<T>(beta1_), b2 = static_cast<T>(beta2_);
    m_ = b1 * m_ + (T(1) - b1) * grad;
    v_ = b2 * v_ + (T(1) - b2) * grad.cwiseAbs2();
    const T c1 = static_cast<T>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const T c2 = static_cast<T>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    params.array() -= static_cast<T>(lr_) * (m_.array() / c1) / ((v_.array() / c2).sqrt() + static_cast<T>(eps_));
}

template class BasicMlp<float>;
template class BasicMlp<double>;
template class BasicAdam<float>;
template class BasicAdam<double>;

}  // namespace fedsac
