#pragma once

// Run configuration: ring selection and a JSON config file naming the
// realization, the differential data, and computation caps. Anything left
// out falls back to the standard type A setup on four strands.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "soergel/diffdata.hpp"

namespace soergel {

struct RingSpec {
    enum class Kind { integers, rationals, prime_field };
    Kind kind = Kind::integers;
    std::int64_t p = 0;

    static RingSpec parse(std::string_view s) {
        if (s == "Z") return {Kind::integers, 0};
        if (s == "Q") return {Kind::rationals, 0};
        if (s.rfind("Fp:", 0) == 0) {
            std::int64_t p = 0;
            for (char c : s.substr(3)) {
                SOERGEL_REQUIRE(c >= '0' && c <= '9', "ring spec: bad prime in '",
                                std::string(s), "'");
                p = p * 10 + (c - '0');
            }
            SOERGEL_REQUIRE(p >= 2, "ring spec: prime must be at least 2");
            return {Kind::prime_field, p};
        }
        SOERGEL_REQUIRE(false, "ring spec: expected Z, Q or Fp:<p>, got '", std::string(s),
                        "'");
        return {};
    }

    std::string str() const {
        switch (kind) {
            case Kind::integers: return "Z";
            case Kind::rationals: return "Q";
            case Kind::prime_field: return "Fp:" + std::to_string(p);
        }
        return "?";
    }
};

struct RunConfig {
    Json raw = Json::object();

    static RunConfig load(const std::string& path) {
        RunConfig c;
        if (path.empty()) return c;
        std::ifstream in(path);
        SOERGEL_REQUIRE(in.good(), "config: cannot open '", path, "'");
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            c.raw = Json::parse(buf.str());
        } catch (const std::exception& e) {
            SOERGEL_REQUIRE(false, "config: '", path, "' is not valid JSON: ", e.what());
        }
        SOERGEL_REQUIRE(c.raw.is_object(), "config: top level must be an object");
        return c;
    }

    // {"standard": "type_a", "n": 4} | {"standard": "d4"} |
    // {"standard": "type_a_quotient", "n": 4} | full realization/1 block
    template <class K>
    Realization<K> realization(RingCtx<K> ctx) const {
        if (!raw.contains("realization"))
            return Realization<K>::standard_type_a(4, ctx);
        const Json& j = raw.at("realization");
        SOERGEL_REQUIRE(j.is_object(), "config: \"realization\" must be an object");
        if (j.contains("standard")) {
            std::string kind = j.at("standard").get<std::string>();
            unsigned n = j.value("n", 4u);
            if (kind == "type_a") return Realization<K>::standard_type_a(n, ctx);
            if (kind == "type_a_quotient") return Realization<K>::type_a_quotient(n, ctx);
            if (kind == "d4") return Realization<K>::standard_d4(ctx);
            SOERGEL_REQUIRE(false, "config: unknown standard realization '", kind, "'");
        }
        return Realization<K>::from_json(j, ctx);
    }

    // {"standard": "forward"|"reverse"|"zero"} | full differential/1 block;
    // optional "mode": "relaxed" skips the validity check
    template <class K>
    PotentialDifferential<K> differential(const Realization<K>& r) const {
        PdMode mode = PdMode::strict;
        if (raw.contains("differential") && raw.at("differential").is_object() &&
            raw.at("differential").value("mode", "") == "relaxed")
            mode = PdMode::relaxed;
        if (!raw.contains("differential"))
            return PotentialDifferential<K>::standard_type_a(r, false);
        const Json& j = raw.at("differential");
        SOERGEL_REQUIRE(j.is_object(), "config: \"differential\" must be an object");
        if (j.contains("standard")) {
            std::string kind = j.at("standard").get<std::string>();
            if (kind == "forward") return PotentialDifferential<K>::standard_type_a(r, false);
            if (kind == "reverse") return PotentialDifferential<K>::standard_type_a(r, true);
            if (kind == "zero") return PotentialDifferential<K>::zero(r);
            SOERGEL_REQUIRE(false, "config: unknown standard differential '", kind, "'");
        }
        return PotentialDifferential<K>::from_json(r, j, mode);
    }

    unsigned cap(const std::string& name, unsigned dflt) const {
        if (!raw.contains("caps")) return dflt;
        return raw.at("caps").value(name, dflt);
    }

    bool has_custom_differential() const { return raw.contains("differential"); }
};

} // namespace soergel
