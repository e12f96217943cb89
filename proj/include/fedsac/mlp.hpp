#pragma once

// Small fully connected network with manual backpropagation. Parameters
// live in one contiguous vector so optimizers, target averaging, finite
// differences and serialization all work on a flat view. Instantiated for
// float (training) and double (inference, gradient checks).

#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fedsac {

template <typename T>
class BasicMlp {
public:
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    BasicMlp() = default;
    /// dims = {input, hidden..., output}; ReLU on hidden layers, linear head.
    /// Weights and biases start uniform in +-1/sqrt(fan_in). The draws are
    /// made in double, so both precisions start from the same network.
    BasicMlp(std::vector<int> dims, std::mt19937_64& rng);

    struct Cache {
        std::vector<Matrix> acts;  // acts[0] is the input batch
    };

    /// x is (input x batch); returns (output x batch).
    Matrix forward(const Matrix& x, Cache* cache = nullptr) const;

    /// Backpropagates d_out through the cached pass. Parameter gradients are
    /// added into *grad (sized num_params()) and the input gradient is
    /// written to *d_input; either may be null.
    void backward(const Cache& cache, const Matrix& d_out, Vector* grad, Matrix* d_input) const;

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int layers() const { return static_cast<int>(dims_.size()) - 1; }
    Eigen::Index num_params() const { return params_.size(); }

    Vector& params() { return params_; }
    const Vector& params() const { return params_; }

    Eigen::Map<const Matrix> weight(int layer) const;
    Eigen::Map<const Vector> bias(int layer) const;

    /// Bit pattern of every hidden ReLU for the batch; used by gradient
    /// checks to skip stencils that straddle a kink.
    std::vector<bool> activation_pattern(const Matrix& x) const;

    template <typename U>
    BasicMlp<U> cast() const {
        BasicMlp<U> out;
        out.dims_ = dims_;
        out.w_off_ = w_off_;
        out.b_off_ = b_off_;
        out.params_ = params_.template cast<U>();
        return out;
    }

private:
    template <typename>
    friend class BasicMlp;

    void build_offsets();

    std::vector<int> dims_;
    std::vector<Eigen::Index> w_off_;
    std::vector<Eigen::Index> b_off_;
    Vector params_;
};

using Mlp = BasicMlp<double>;

/// target <- tau * source + (1 - tau) * target
template <typename T>
void polyak_update(BasicMlp<T>& target, const BasicMlp<T>& source, double tau) {
    const T t = static_cast<T>(tau);
    target.params() = t * source.params() + (T(1) - t) * target.params();
}

template <typename T>
class BasicAdam {
public:
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    BasicAdam() = default;
    BasicAdam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    /// Gradient descent step on params.
    void step(Eigen::Ref<Vector> params, const Vector& grad);

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }
    long steps() const { return t_; }

private:
    Vector m_, v_;
    double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
};

using Adam = BasicAdam<double>;

extern template class BasicMlp<float>;
extern template class BasicMlp<double>;
extern template class BasicAdam<float>;
extern template class BasicAdam<double>;

}  // namespace fedsac
