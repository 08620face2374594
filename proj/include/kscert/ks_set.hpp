#pragma once

#include "kscert/eisenstein.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kscert {

/// Raised when input text is not well-formed JSON or has the wrong shape.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a structurally well-formed set violates a semantic rule
/// (duplicate ids, non-orthogonal context, profile mismatch, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One ray, stored with exact coordinates. `squared_norm` caches the exact
/// value of <v, v>, a positive integer once validated.
struct KsVector {
    int id = 0;
    std::vector<EisensteinInt> entries;
    std::int64_t squared_norm = 0;
};

/// A measurement context: ids of pairwise orthogonal vectors. A context with
/// exactly `dimension` members is a complete orthogonal basis.
struct Context {
    std::vector<int> member_ids;
};

struct KsSet {
    int dimension = 0;
    std::string profile = "generic";
    std::vector<KsVector> vectors;  ///< sorted by id; ids are exactly 1..n
    std::vector<Context> contexts;

    const KsVector& vector_by_id(int id) const;
    bool context_is_complete(const Context& c) const {
        return static_cast<int>(c.member_ids.size()) == dimension;
    }
};

/// Exact Hermitian inner product  sum_l conj(u_l) * v_l.
/// Throws std::invalid_argument on dimension mismatch.
EisensteinInt inner_product_exact(const KsVector& u, const KsVector& v);

/// Computes cached norms and enforces every structural rule. The `ks21`
/// profile additionally requires dimension 6, 21 vectors, 7 complete contexts
/// and exactly two context memberships per vector. Throws ValidationError
/// with a diagnostic naming the offending ids.
void validate_ks_set(KsSet& set);

KsSet load_ks_set(const std::string& json_text);
KsSet load_ks_set_file(const std::string& path);
std::string to_json(const KsSet& set);

/// Unit-normalized numeric embedding of a ray.
Eigen::VectorXcd to_unit_vector(const KsVector& v);

/// Rank-one projector |v><v| / <v, v>.
Eigen::MatrixXcd projector(const KsVector& v);

}  // namespace kscert
