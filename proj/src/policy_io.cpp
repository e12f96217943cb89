#include "fedsac/policy_io.hpp"

#include <array>
#include <cmath>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace fedsac {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'E', 'D', 'S', 'A', 'C', 'P', 'L'};
constexpr std::uint32_t kCapCount = 6;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
public:
    explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    template <typename T>
    T get(const char* what) {
        if (bytes_.size() - pos_ < sizeof(T)) throw std::runtime_error(fmt::format("checkpoint: truncated {}", what));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_policy(std::ostream& out, const TrainedPolicy& policy) {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(policy.workers));
    const auto& dims = policy.net.dims();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    put<std::uint32_t>(out, kCapCount);
    const auto& c = policy.caps;
    for (double v : {c.f_hz, c.p_w, c.bandwidth_hz, c.samples, c.local_iters, c.wasted_j}) put<double>(out, v);
    const auto& p = policy.net.params();
    out.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_policy(const std::string& path, const TrainedPolicy& policy) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("checkpoint: cannot open '{}' for writing", path));
    write_policy(out, policy);
}

TrainedPolicy read_policy(std::istream& in, std::optional<int> expected_workers) {
    Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));
    std::array<char, 8> magic{};
    for (auto& ch : magic) ch = r.get<char>("magic");
    if (magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion)
        throw std::runtime_error(fmt::format("checkpoint: unsupported version {}", version));
    const auto k = r.get<std::uint32_t>("worker count");
    if (k < 1 || k > 100000) throw std::runtime_error(fmt::format("checkpoint: implausible worker count {}", k));
    if (expected_workers && static_cast<int>(k) != *expected_workers)
        throw std::runtime_error(
            fmt::format("checkpoint: trained for K={} but the environment has K={}", k, *expected_workers));

    const auto n = r.get<std::uint32_t>("layer count");
    if (n < 2 || n > 64) throw std::runtime_error(fmt::format("checkpoint: implausible layer count {}", n));
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto d = r.get<std::uint32_t>("layer sizes");
        if (d < 1 || d > (1u << 16)) throw std::runtime_error(fmt::format("checkpoint: implausible layer size {}", d));
        dims.push_back(static_cast<int>(d));
    }
    if (dims.front() != static_cast<int>(6 * k + 1) || dims.back() != static_cast<int>(4 * k))
        throw std::runtime_error("checkpoint: layer shapes do not match the worker count");

    const auto ncaps = r.get<std::uint32_t>("cap count");
    if (ncaps != kCapCount) throw std::runtime_error(fmt::format("checkpoint: expected {} caps, got {}", kCapCount, ncaps));
    NormalizationCaps caps;
    for (double* v : {&caps.f_hz, &caps.p_w, &caps.bandwidth_hz, &caps.samples, &caps.local_iters, &caps.wasted_j}) {
        *v = r.get<double>("caps");
        if (!(std::isfinite(*v) && *v > 0.0)) throw std::runtime_error("checkpoint: caps must be positive");
    }

    std::size_t expected = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l)
        expected += static_cast<std::size_t>(dims[l]) * dims[l + 1] + dims[l + 1];
    if (r.remaining() != expected * sizeof(double))
        throw std::runtime_error(fmt::format("checkpoint: expected {} weight bytes, found {}",
                                             expected * sizeof(double), r.remaining()));

    std::mt19937_64 unused;
    TrainedPolicy policy{static_cast<int>(k), Mlp(dims, unused), caps};
    auto& p = policy.net.params();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        p(i) = r.get<double>("weights");
        if (!std::isfinite(p(i))) throw std::runtime_error("checkpoint: non-finite weight");
    }
    return policy;
}

TrainedPolicy load_policy(const std::string& path, std::optional<int> expected_workers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("checkpoint: cannot open '{}'", path));
    return read_policy(in, expected_workers);
}

}  // namespace fedsac
