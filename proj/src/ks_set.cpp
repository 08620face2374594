#include "kscert/ks_set.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kscert {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string pair_text(int ctx_index, int id_u, int id_v, const EisensteinInt& ip) {
    std::ostringstream os;
    os << "context " << ctx_index + 1 << ": vectors " << id_u << " and " << id_v
       << " are not orthogonal (<u,v> = " << to_string(ip) << ")";
    return os.str();
}

std::int64_t require_int(const json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw ParseError(where + " must be an integer");
    return j.get<std::int64_t>();
}

}  // namespace

const KsVector& KsSet::vector_by_id(int id) const {
    if (id < 1 || id > static_cast<int>(vectors.size()))
        throw std::out_of_range("vector id " + std::to_string(id) + " is out of range");
    return vectors[static_cast<std::size_t>(id) - 1];
}

EisensteinInt inner_product_exact(const KsVector& u, const KsVector& v) {
    if (u.entries.size() != v.entries.size())
        throw std::invalid_argument("inner_product_exact: dimension mismatch");
    EisensteinInt acc;
    for (std::size_t l = 0; l < u.entries.size(); ++l)
        acc = acc + eisenstein_mul(eisenstein_conj(u.entries[l]), v.entries[l]);
    return acc;
}

void validate_ks_set(KsSet& set) {
    if (set.dimension < 1) throw ValidationError("dimension must be a positive integer");
    const int n = static_cast<int>(set.vectors.size());
    if (n == 0) throw ValidationError("vector list is empty");

    std::sort(set.vectors.begin(), set.vectors.end(),
              [](const KsVector& x, const KsVector& y) { return x.id < y.id; });
    for (int i = 0; i < n; ++i) {
        if (set.vectors[i].id != i + 1)
            throw ValidationError("vector ids must be exactly 1.." + std::to_string(n) +
                                  " (problem near id " + std::to_string(set.vectors[i].id) + ")");
    }

    for (KsVector& v : set.vectors) {
        if (static_cast<int>(v.entries.size()) != set.dimension)
            throw ValidationError("vector " + std::to_string(v.id) + " has " +
                                  std::to_string(v.entries.size()) + " entries, expected " +
                                  std::to_string(set.dimension));
        const EisensteinInt nrm = inner_product_exact(v, v);
        // <v,v> is a sum of squared moduli, so its omega part vanishes exactly.
        if (nrm.b != 0)
            throw ValidationError("internal error: non-real norm for vector " + std::to_string(v.id));
        if (nrm.a <= 0)
            throw ValidationError("vector " + std::to_string(v.id) + " is the zero vector");
        v.squared_norm = nrm.a;
    }

    std::vector<int> memberships(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < set.contexts.size(); ++k) {
        const auto& members = set.contexts[k].member_ids;
        if (members.empty())
            throw ValidationError("context " + std::to_string(k + 1) + " is empty");
        if (static_cast<int>(members.size()) > set.dimension)
            throw ValidationError("context " + std::to_string(k + 1) + " has " +
                                  std::to_string(members.size()) +
                                  " members, more than the dimension");
        for (std::size_t a = 0; a < members.size(); ++a) {
            const int id = members[a];
            if (id < 1 || id > n)
                throw ValidationError("context " + std::to_string(k + 1) +
                                      " references unknown vector id " + std::to_string(id));
            ++memberships[static_cast<std::size_t>(id) - 1];
            for (std::size_t b = 0; b < a; ++b) {
                if (members[b] == id)
                    throw ValidationError("context " + std::to_string(k + 1) +
                                          " lists vector id " + std::to_string(id) + " twice");
                const EisensteinInt ip =
                    inner_product_exact(set.vector_by_id(members[b]), set.vector_by_id(id));
                if (!ip.is_zero())
                    throw ValidationError(pair_text(static_cast<int>(k), members[b], id, ip));
            }
        }
    }

    if (set.profile == "ks21") {
        if (set.dimension != 6)
            throw ValidationError("profile ks21 requires dimension 6");
        if (n != 21)
            throw ValidationError("profile ks21 requires exactly 21 vectors, found " +
                                  std::to_string(n));
        if (set.contexts.size() != 7)
            throw ValidationError("profile ks21 requires exactly 7 contexts, found " +
                                  std::to_string(set.contexts.size()));
        for (std::size_t k = 0; k < set.contexts.size(); ++k)
            if (!set.context_is_complete(set.contexts[k]))
                throw ValidationError("profile ks21: context " + std::to_string(k + 1) +
                                      " is not a complete basis (size " +
                                      std::to_string(set.contexts[k].member_ids.size()) + ")");
        for (int i = 0; i < n; ++i)
            if (memberships[static_cast<std::size_t>(i)] != 2)
                throw ValidationError("profile ks21: vector " + std::to_string(i + 1) +
                                      " appears in " +
                                      std::to_string(memberships[static_cast<std::size_t>(i)]) +
                                      " contexts, expected 2");
    }
}

KsSet load_ks_set(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top-level value must be an object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "dimension" && key != "profile" && key != "vectors" && key != "contexts")
            throw ParseError("unknown top-level key '" + key + "'");
    }
    if (!j.contains("dimension") || !j.contains("vectors") || !j.contains("contexts"))
        throw ParseError("required keys: dimension, vectors, contexts");

    KsSet set;
    set.dimension = static_cast<int>(require_int(j["dimension"], "dimension"));
    if (j.contains("profile")) {
        if (!j["profile"].is_string()) throw ParseError("profile must be a string");
        set.profile = j["profile"].get<std::string>();
    }

    if (!j["vectors"].is_array()) throw ParseError("vectors must be an array");
    for (const auto& jv : j["vectors"]) {
        if (!jv.is_object() || !jv.contains("id") || !jv.contains("entries"))
            throw ParseError("each vector must be an object with keys id and entries");
        KsVector v;
        v.id = static_cast<int>(require_int(jv["id"], "vector id"));
        if (!jv["entries"].is_array())
            throw ParseError("entries of vector " + std::to_string(v.id) + " must be an array");
        for (const auto& je : jv["entries"]) {
            if (!je.is_array() || je.size() != 2)
                throw ParseError("each entry of vector " + std::to_string(v.id) +
                                 " must be a pair [a, b]");
            EisensteinInt e;
            e.a = require_int(je[0], "entry coordinate");
            e.b = require_int(je[1], "entry coordinate");
            v.entries.push_back(e);
        }
        set.vectors.push_back(std::move(v));
    }

    if (!j["contexts"].is_array()) throw ParseError("contexts must be an array");
    for (const auto& jc : j["contexts"]) {
        if (!jc.is_array()) throw ParseError("each context must be an array of vector ids");
        Context c;
        for (const auto& jid : jc)
            c.member_ids.push_back(static_cast<int>(require_int(jid, "context member id")));
        set.contexts.push_back(std::move(c));
    }

    validate_ks_set(set);
    return set;
}

KsSet load_ks_set_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_ks_set(buf.str());
}

std::string to_json(const KsSet& set) {
    ordered_json j;
    j["dimension"] = set.dimension;
    j["profile"] = set.profile;
    j["vectors"] = ordered_json::array();
    for (const KsVector& v : set.vectors) {
        ordered_json jv;
        jv["id"] = v.id;
        ordered_json entries = ordered_json::array();
        for (const EisensteinInt& e : v.entries) entries.push_back({e.a, e.b});
        jv["entries"] = std::move(entries);
        j["vectors"].push_back(std::move(jv));
    }
    j["contexts"] = ordered_json::array();
    for (const Context& c : set.contexts) j["contexts"].push_back(c.member_ids);
    return j.dump(2) + "\n";
}

Eigen::VectorXcd to_unit_vector(const KsVector& v) {
    if (v.squared_norm <= 0)
        throw std::invalid_argument("to_unit_vector: vector has no cached positive norm; "
                                    "run validate_ks_set first");
    Eigen::VectorXcd u(static_cast<Eigen::Index>(v.entries.size()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(v.squared_norm));
    for (std::size_t l = 0; l < v.entries.size(); ++l)
        u(static_cast<Eigen::Index>(l)) = scale * to_complex(v.entries[l]);
    return u;
}

Eigen::MatrixXcd projector(const KsVector& v) {
    const Eigen::VectorXcd u = to_unit_vector(v);
    return u * u.adjoint();
}

}  // namespace kscert
