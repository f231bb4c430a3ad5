#include "vmpo/seqmpo.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace vmpo {

namespace {

using nlohmann::json;

// Bit of qubit q (1-based, qubit 1 most significant) in configuration
// `config` of an N-qubit register.
inline int config_bit(std::uint32_t config, int q, int n_qubits) {
    return static_cast<int>((config >> (n_qubits - q)) & 1u);
}

void require_valid_site_count(const SequentialMPO& mpo) {
    validate_shape(mpo.shape);
    if (static_cast<int>(mpo.sites.size()) != mpo.shape.n_qubits) {
        throw std::invalid_argument(
            "mpo: chain has " + std::to_string(mpo.sites.size()) +
            " sites, expected " + std::to_string(mpo.shape.n_qubits));
    }
}

}  // namespace

ComplexMatrix BipartiteUnitary::ancilla_block(int row_bit, int col_bit) const {
    const Eigen::Index d = ancilla_dim();
    return matrix.block(row_bit * d, col_bit * d, d, d);
}

SequentialMPO identity_mpo(const SystemShape& shape) {
    validate_shape(shape);
    SequentialMPO mpo;
    mpo.shape = shape;
    const Eigen::Index dim = 2 * shape.ancilla_dim;
    mpo.sites.reserve(static_cast<std::size_t>(shape.n_qubits));
    for (int k = 1; k <= shape.n_qubits; ++k) {
        mpo.sites.push_back({k, ComplexMatrix::Identity(dim, dim), std::nullopt});
    }
    return mpo;
}

SequentialMPO random_mpo(const SystemShape& shape, std::uint64_t seed) {
    validate_shape(shape);
    SequentialMPO mpo;
    mpo.shape = shape;
    const Eigen::Index dim = 2 * shape.ancilla_dim;
    mpo.sites.reserve(static_cast<std::size_t>(shape.n_qubits));
    for (int k = 1; k <= shape.n_qubits; ++k) {
        mpo.sites.push_back(
            {k, haar_random_unitary(dim, mix_seed(seed, static_cast<std::uint64_t>(k))),
             std::nullopt});
    }
    return mpo;
}

void validate_mpo(const SequentialMPO& mpo, double unitarity_tol) {
    require_valid_site_count(mpo);
    const Eigen::Index dim = 2 * mpo.shape.ancilla_dim;
    for (std::size_t i = 0; i < mpo.sites.size(); ++i) {
        const BipartiteUnitary& site = mpo.sites[i];
        if (site.site_index != static_cast<int>(i) + 1) {
            throw std::invalid_argument("mpo: site " + std::to_string(i + 1) +
                                        " carries site_index " +
                                        std::to_string(site.site_index));
        }
        if (site.matrix.rows() != dim || site.matrix.cols() != dim) {
            throw std::invalid_argument(
                "mpo: site " + std::to_string(i + 1) + " matrix is " +
                std::to_string(site.matrix.rows()) + "x" +
                std::to_string(site.matrix.cols()) + ", expected " +
                std::to_string(dim) + "x" + std::to_string(dim));
        }
        if (!site.matrix.allFinite()) {
            throw std::invalid_argument("mpo: site " + std::to_string(i + 1) +
                                        " matrix has non-finite entries");
        }
        const double dev = max_abs_diff(site.matrix * site.matrix.adjoint(),
                                        ComplexMatrix::Identity(dim, dim));
        if (dev > unitarity_tol) {
            throw std::invalid_argument("mpo: site " + std::to_string(i + 1) +
                                        " deviates from unitarity by " +
                                        std::to_string(dev));
        }
        if (site.h_coeffs &&
            site.h_coeffs->size() !=
                static_cast<std::size_t>(4 * mpo.shape.ancilla_dim * mpo.shape.ancilla_dim)) {
            throw std::invalid_argument("mpo: site " + std::to_string(i + 1) +
                                        " h_coeffs has wrong length");
        }
    }
}

ComplexMatrix embed_site(const BipartiteUnitary& site, const SystemShape& shape) {
    validate_shape(shape);
    const Eigen::Index d = shape.ancilla_dim;
    if (site.matrix.rows() != 2 * d || site.matrix.cols() != 2 * d) {
        throw std::invalid_argument("embed_site: site matrix must be 2D x 2D");
    }
    const int n = shape.n_qubits;
    const int k = site.site_index;
    if (k < 1 || k > n) {
        throw std::invalid_argument("embed_site: site_index out of range");
    }
    const Eigen::Index full = shape.full_dim();
    const Eigen::Index n_configs = shape.gate_dim();
    ComplexMatrix out = ComplexMatrix::Zero(full, full);
    // E_k couples qubit k and the ancilla; all other qubits are
    // spectators, so only configuration pairs differing at most on
    // qubit k contribute.
    for (std::uint32_t q = 0; q < static_cast<std::uint32_t>(n_configs); ++q) {
        const int bit = config_bit(q, k, n);
        for (int bit_p : {0, 1}) {
            const std::uint32_t qp =
                (q & ~(1u << (n - k))) | (static_cast<std::uint32_t>(bit_p) << (n - k));
            out.block(static_cast<Eigen::Index>(q) * d,
                      static_cast<Eigen::Index>(qp) * d, d, d) =
                site.ancilla_block(bit, bit_p);
        }
    }
    return out;
}

ComplexMatrix contract_to_dense(const SequentialMPO& mpo) {
    require_valid_site_count(mpo);
    const int n = mpo.shape.n_qubits;
    const Eigen::Index d = mpo.shape.ancilla_dim;
    const Eigen::Index n_configs = mpo.shape.gate_dim();
    ComplexMatrix out(mpo.shape.full_dim(), mpo.shape.full_dim());
    for (std::uint32_t q = 0; q < static_cast<std::uint32_t>(n_configs); ++q) {
        for (std::uint32_t qp = 0; qp < static_cast<std::uint32_t>(n_configs); ++qp) {
            // Ancilla block of E_N ... E_1 between configurations
            // (q, q'): product of per-site blocks, site N leftmost.
            ComplexMatrix acc = mpo.sites[static_cast<std::size_t>(n - 1)].ancilla_block(
                config_bit(q, n, n), config_bit(qp, n, n));
            for (int k = n - 1; k >= 1; --k) {
                acc *= mpo.sites[static_cast<std::size_t>(k - 1)].ancilla_block(
                    config_bit(q, k, n), config_bit(qp, k, n));
            }
            out.block(static_cast<Eigen::Index>(q) * d,
                      static_cast<Eigen::Index>(qp) * d, d, d) = acc;
        }
    }
    return out;
}

OverlapNetwork OverlapNetwork::for_unitary(const ComplexMatrix& target,
                                           const SystemShape& shape) {
    validate_shape(shape);
    const Eigen::Index full = shape.full_dim();
    if (target.rows() != full || target.cols() != full) {
        throw std::invalid_argument("OverlapNetwork: target is " +
                                    std::to_string(target.rows()) + "x" +
                                    std::to_string(target.cols()) + ", expected " +
                                    std::to_string(full) + "x" + std::to_string(full));
    }
    if (!target.allFinite()) {
        throw std::invalid_argument("OverlapNetwork: target has non-finite entries");
    }
    OverlapNetwork net;
    net.shape_ = shape;
    const Eigen::Index d = shape.ancilla_dim;
    const Eigen::Index n_configs = shape.gate_dim();
    for (std::uint32_t q = 0; q < static_cast<std::uint32_t>(n_configs); ++q) {
        for (std::uint32_t qp = 0; qp < static_cast<std::uint32_t>(n_configs); ++qp) {
            ComplexMatrix block = target.block(static_cast<Eigen::Index>(q) * d,
                                               static_cast<Eigen::Index>(qp) * d, d, d);
            if (block.cwiseAbs().maxCoeff() == 0.0) continue;  // exactly zero
            net.entries_.push_back(Entry{q, qp, block.adjoint()});
        }
    }
    return net;
}

OverlapNetwork OverlapNetwork::for_isometry(const ComplexMatrix& target_isometry,
                                            const ComplexMatrix& input_contraction,
                                            const SystemShape& shape) {
    validate_shape(shape);
    const Eigen::Index full = shape.full_dim();
    const Eigen::Index m_dim = shape.input_dim();
    if (target_isometry.rows() != full || target_isometry.cols() != m_dim) {
        throw std::invalid_argument(
            "OverlapNetwork: isometry target is " +
            std::to_string(target_isometry.rows()) + "x" +
            std::to_string(target_isometry.cols()) + ", expected " +
            std::to_string(full) + "x" + std::to_string(m_dim));
    }
    if (input_contraction.rows() != full || input_contraction.cols() != m_dim) {
        throw std::invalid_argument("OverlapNetwork: input contraction is " +
                                    std::to_string(input_contraction.rows()) + "x" +
                                    std::to_string(input_contraction.cols()) +
                                    ", expected " + std::to_string(full) + "x" +
                                    std::to_string(m_dim));
    }
    // Tr[V† U K] = <V K†, U>: fold the input legs into a square
    // effective target and reuse the unitary-mode machinery.
    return for_unitary(target_isometry * input_contraction.adjoint(), shape);
}

std::complex<double> OverlapNetwork::overlap(const SequentialMPO& mpo) const {
    require_valid_site_count(mpo);
    if (!(mpo.shape == shape_)) {
        throw std::invalid_argument("OverlapNetwork: mpo shape mismatch");
    }
    const int n = shape_.n_qubits;
    std::complex<double> total(0.0, 0.0);
    for (const Entry& e : entries_) {
        ComplexMatrix acc = mpo.sites[static_cast<std::size_t>(n - 1)].ancilla_block(
            config_bit(e.row_config, n, n), config_bit(e.col_config, n, n));
        for (int k = n - 1; k >= 1; --k) {
            acc *= mpo.sites[static_cast<std::size_t>(k - 1)].ancilla_block(
                config_bit(e.row_config, k, n), config_bit(e.col_config, k, n));
        }
        total += (e.block * acc).trace();
    }
    return total;
}

ComplexMatrix OverlapNetwork::environment(const SequentialMPO& mpo, int site_k) const {
    require_valid_site_count(mpo);
    if (!(mpo.shape == shape_)) {
        throw std::invalid_argument("OverlapNetwork: mpo shape mismatch");
    }
    const int n = shape_.n_qubits;
    if (site_k < 1 || site_k > n) {
        throw std::invalid_argument("environment: site index " +
                                    std::to_string(site_k) + " out of range 1.." +
                                    std::to_string(n));
    }
    const Eigen::Index d = shape_.ancilla_dim;
    ComplexMatrix env = ComplexMatrix::Zero(2 * d, 2 * d);
    for (const Entry& e : entries_) {
        // Left part L = B_N ... B_{k+1}, right part R = B_{k-1} ... B_1.
        ComplexMatrix left = ComplexMatrix::Identity(d, d);
        for (int k = n; k > site_k; --k) {
            left *= mpo.sites[static_cast<std::size_t>(k - 1)].ancilla_block(
                config_bit(e.row_config, k, n), config_bit(e.col_config, k, n));
        }
        ComplexMatrix right = ComplexMatrix::Identity(d, d);
        for (int k = site_k - 1; k >= 1; --k) {
            right *= mpo.sites[static_cast<std::size_t>(k - 1)].ancilla_block(
                config_bit(e.row_config, k, n), config_bit(e.col_config, k, n));
        }
        // <T, U_seq> = Tr[Tblk† L B_k R] = Tr[(L† Tblk R†)† B_k]; the
        // stored block is already Tblk†, so the hole contribution to
        // the (a, b) ancilla block of the environment is (R Tblk† L)†
        // restricted to the site-k bits (a, b) of this entry.
        const ComplexMatrix hole = (right * e.block * left).adjoint();
        const int a = config_bit(e.row_config, site_k, n);
        const int b = config_bit(e.col_config, site_k, n);
        env.block(a * d, b * d, d, d) += hole;
    }
    return env;
}

std::complex<double> overlap_with_target(const SequentialMPO& mpo,
                                         const ComplexMatrix& target) {
    return OverlapNetwork::for_unitary(target, mpo.shape).overlap(mpo);
}

ComplexMatrix environment(const SequentialMPO& mpo, const ComplexMatrix& target,
                          int site_k) {
    return OverlapNetwork::for_unitary(target, mpo.shape).environment(mpo, site_k);
}

std::complex<double> overlap_isometry(const SequentialMPO& mpo,
                                      const ComplexMatrix& target_isometry,
                                      const std::vector<ComplexVector>& psi_fixed,
                                      const ComplexVector& phi_ancilla) {
    const ComplexMatrix k = input_contraction(mpo.shape, psi_fixed, phi_ancilla);
    return OverlapNetwork::for_isometry(target_isometry, k, mpo.shape).overlap(mpo);
}

namespace {

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) {
        throw std::invalid_argument("mpo json: matrix must be a non-empty array");
    }
    const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index n_cols = static_cast<Eigen::Index>(rows.at(0).size());
    ComplexMatrix m(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const json& row = rows.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != n_cols) {
            throw std::invalid_argument("mpo json: ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < n_cols; ++c) {
            const json& cell = row.at(static_cast<std::size_t>(c));
            if (!cell.is_array() || cell.size() != 2) {
                throw std::invalid_argument(
                    "mpo json: matrix entries must be [re, im] pairs");
            }
            m(r, c) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
        }
    }
    return m;
}

json mpo_to_json(const SequentialMPO& mpo) {
    json j;
    j["format"] = "seqmpo";
    j["version"] = 1;
    j["shape"] = {{"n_qubits", mpo.shape.n_qubits},
                  {"ancilla_dim", mpo.shape.ancilla_dim},
                  {"input_qubits", mpo.shape.input_qubits}};
    json sites = json::array();
    for (const BipartiteUnitary& site : mpo.sites) {
        json s;
        s["site_index"] = site.site_index;
        s["matrix"] = matrix_to_json(site.matrix);
        if (site.h_coeffs) s["h_coeffs"] = *site.h_coeffs;
        sites.push_back(std::move(s));
    }
    j["sites"] = std::move(sites);
    return j;
}

SequentialMPO mpo_from_json(const json& j) {
    if (j.value("format", std::string{}) != "seqmpo") {
        throw std::invalid_argument("mpo json: missing or wrong format tag");
    }
    if (j.value("version", 0) != 1) {
        throw std::invalid_argument("mpo json: unsupported version");
    }
    SequentialMPO mpo;
    const json& shape = j.at("shape");
    mpo.shape.n_qubits = shape.at("n_qubits").get<int>();
    mpo.shape.ancilla_dim = shape.at("ancilla_dim").get<int>();
    mpo.shape.input_qubits = shape.at("input_qubits").get<int>();
    for (const json& s : j.at("sites")) {
        BipartiteUnitary site;
        site.site_index = s.at("site_index").get<int>();
        site.matrix = matrix_from_json(s.at("matrix"));
        if (s.contains("h_coeffs")) {
            site.h_coeffs = s.at("h_coeffs").get<std::vector<double>>();
        }
        mpo.sites.push_back(std::move(site));
    }
    validate_mpo(mpo);
    return mpo;
}

}  // namespace

std::string mpo_to_json_string(const SequentialMPO& mpo) {
    require_valid_site_count(mpo);
    return mpo_to_json(mpo).dump(2);
}

SequentialMPO mpo_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("mpo json: parse error: ") +
                                    err.what());
    }
    return mpo_from_json(j);
}

void save_mpo(const SequentialMPO& mpo, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_mpo: cannot open " + path.string() +
                                 " for writing");
    }
    out << mpo_to_json_string(mpo) << '\n';
    if (!out) {
        throw std::runtime_error("save_mpo: write to " + path.string() + " failed");
    }
}

SequentialMPO load_mpo(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_mpo: cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return mpo_from_json_string(buffer.str());
}

}  // namespace vmpo
