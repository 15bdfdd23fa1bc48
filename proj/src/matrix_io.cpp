#include "decaylab/matrix_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace decaylab {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'L', 'O', 'P'};

template <typename T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated operator file");
    return value;
}

}  // namespace

void write_operator_binary(const std::string& path, const HermitianOperator& op) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic.data(), kMagic.size());
    put(out, kOperatorFormatVersion);
    put(out, static_cast<std::uint64_t>(op.dim()));
    put(out, static_cast<std::uint32_t>(op.role()));
    put(out, op.grid_hash());
    const Matrix& m = op.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put(out, m(r, c).real());
            put(out, m(r, c).imag());
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

HermitianOperator read_operator_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error(path + " is not an operator dump");
    const auto version = get<std::uint32_t>(in);
    if (version != kOperatorFormatVersion) {
        throw std::runtime_error("unsupported operator format version " + std::to_string(version));
    }
    const auto dim = static_cast<Eigen::Index>(get<std::uint64_t>(in));
    const auto role = get<std::uint32_t>(in);
    if (role > static_cast<std::uint32_t>(Role::generic)) {
        throw std::runtime_error("unknown role index " + std::to_string(role));
    }
    const auto hash = get<std::uint64_t>(in);
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = get<double>(in);
            const double im = get<double>(in);
            m(r, c) = cplx(re, im);
        }
    }
    return HermitianOperator::from_matrix(std::move(m), static_cast<Role>(role), hash);
}

void write_operator_csv(const std::string& path, const HermitianOperator& op) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# dim=" << op.dim() << " role=" << to_string(op.role()) << " grid_hash=" << std::hex
        << op.grid_hash() << std::dec << '\n';
    out << std::setprecision(17);
    const Matrix& m = op.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << m(r, c).real() << ',' << m(r, c).imag();
        }
        out << '\n';
    }
}

}  // namespace decaylab
