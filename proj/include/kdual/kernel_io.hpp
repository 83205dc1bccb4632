#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kdual/common.hpp"
#include "kdual/step_kernel.hpp"

namespace kdual {

// Kernel spec files look like
//   weights: [0.5, 0.5]
//   values: [[0, 3], [3, 0]]
// Whitespace and newlines inside the brackets are ignored.

namespace detail {

class SpecScanner {
public:
    explicit SpecScanner(std::string text) : text_(std::move(text)) {}

    void expect_key(const std::string& key) {
        skip_ws();
        if (text_.compare(pos_, key.size(), key) != 0)
            throw validation_error("kernel spec: expected field '" + key + "'");
        pos_ += key.size();
        skip_ws();
        expect(':');
    }

    std::vector<double> list() {
        skip_ws();
        expect('[');
        std::vector<double> out;
        skip_ws();
        if (peek() == ']') { ++pos_; return out; }
        while (true) {
            out.push_back(number());
            skip_ws();
            if (peek() == ',') { ++pos_; continue; }
            expect(']');
            return out;
        }
    }

    std::vector<std::vector<double>> nested_list() {
        skip_ws();
        expect('[');
        std::vector<std::vector<double>> out;
        skip_ws();
        if (peek() == ']') { ++pos_; return out; }
        while (true) {
            out.push_back(list());
            skip_ws();
            if (peek() == ',') { ++pos_; continue; }
            expect(']');
            return out;
        }
    }

    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw validation_error(std::string("kernel spec: expected '") + c + "'");
        ++pos_;
    }

    double number() {
        skip_ws();
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(text_.substr(pos_), &used);
        } catch (const std::exception&) {
            throw validation_error("kernel spec: malformed number");
        }
        pos_ += used;
        return v;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string text_;
    std::size_t pos_ = 0;
};

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

inline StepKernel parse_kernel_spec(const std::string& text) {
    detail::SpecScanner sc(text);
    sc.expect_key("weights");
    std::vector<double> weights = sc.list();
    sc.expect_key("values");
    std::vector<std::vector<double>> values = sc.nested_list();
    require(sc.done(), "kernel spec: trailing content");
    return StepKernel(std::move(values), WeightedMeasure(std::move(weights)));
}

inline StepKernel load_kernel_spec(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open kernel spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_kernel_spec(ss.str());
}

template <typename Step>
std::string format_kernel_spec(const Step& k) {
    std::string out = "weights: [";
    for (std::size_t i = 0; i < k.classes(); ++i) {
        if (i) out += ", ";
        out += detail::fmt12(k.measure.weights[i]);
    }
    out += "]\nvalues: [";
    for (std::size_t i = 0; i < k.classes(); ++i) {
        if (i) out += ", ";
        out += "[";
        for (std::size_t j = 0; j < k.classes(); ++j) {
            if (j) out += ", ";
            out += detail::fmt12(k.values[i][j]);
        }
        out += "]";
    }
    out += "]\n";
    return out;
}

inline void save_kernel_spec(const StepKernel& k, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "cannot write kernel spec file: " + path);
    out << format_kernel_spec(k);
}

} // namespace kdual
