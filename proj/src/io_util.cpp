#include "dynlab/io_util.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "json.hpp"

namespace dynlab {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(cplx v) {
    return fmt(v.real()) + "+" + fmt(v.imag()) + "i";
}

struct CsvWriter::Impl {
    std::ofstream f;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->f.open(path, std::ios::binary);  // binary: no platform newline games
    if (!impl_->f) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i)
        impl_->f << (i ? "," : "") << header[i];
    impl_->f << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        impl_->f << (i ? "," : "") << fmt(values[i]);
    impl_->f << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i)
        impl_->f << (i ? "," : "") << fields[i];
    impl_->f << "\n";
}

std::array<uint8_t, 32> sha256_bytes(const void* data, size_t len) {
    std::array<uint8_t, 32> out{};
    unsigned int outlen = 0;
    EVP_Digest(data, len, out.data(), &outlen, EVP_sha256(), nullptr);
    return out;
}

std::array<uint8_t, 32> sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot hash " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (f) {
        f.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, f.gcount());
    }
    std::array<uint8_t, 32> out{};
    unsigned int outlen = 0;
    EVP_DigestFinal_ex(ctx, out.data(), &outlen);
    EVP_MD_CTX_free(ctx);
    return out;
}

std::string hex(const std::array<uint8_t, 32>& digest) {
    static const char* h = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (uint8_t b : digest) {
        s.push_back(h[b >> 4]);
        s.push_back(h[b & 15]);
    }
    return s;
}

MapSpec load_map_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open map file " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("map file " + path + " is not valid JSON: " +
                                    e.what());
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "unicritical") {
        int d = j.at("d").get<int>();
        cplx c(j.at("c")[0].get<double>(), j.at("c")[1].get<double>());
        return MapSpec::unicritical(d, c);
    }
    if (kind == "real-interval") {
        std::vector<double> num;
        for (const auto& v : j.at("num")) num.push_back(v.get<double>());
        double a = j.at("domain")[0].get<double>();
        double b = j.at("domain")[1].get<double>();
        return MapSpec::real_interval(num, a, b);
    }
    auto parse = [](const nlohmann::json& arr) {
        std::vector<cplx> c;
        for (const auto& v : arr) c.emplace_back(v[0].get<double>(), v[1].get<double>());
        return c;
    };
    if (kind == "polynomial") return MapSpec::polynomial(parse(j.at("num")));
    if (kind == "rational")
        return MapSpec::rational(parse(j.at("num")), parse(j.at("den")));
    throw std::invalid_argument("unknown map kind: " + kind);
}

void save_map_spec(const MapSpec& map, const std::string& path) {
    nlohmann::json j;
    auto dump = [](const Polynomial& p) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : p.coeffs()) arr.push_back({c.real(), c.imag()});
        return arr;
    };
    switch (map.kind()) {
        case MapKind::Unicritical:
            j["kind"] = "unicritical";
            j["d"] = map.unicritical_d();
            j["c"] = {map.unicritical_c().real(), map.unicritical_c().imag()};
            break;
        case MapKind::RealInterval: {
            j["kind"] = "real-interval";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : map.numerator().coeffs()) arr.push_back(c.real());
            j["num"] = arr;
            j["domain"] = {map.domain_a(), map.domain_b()};
            break;
        }
        case MapKind::Polynomial:
            j["kind"] = "polynomial";
            j["num"] = dump(map.numerator());
            break;
        case MapKind::Rational:
            j["kind"] = "rational";
            j["num"] = dump(map.numerator());
            j["den"] = dump(map.denominator());
            break;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

} // namespace dynlab
