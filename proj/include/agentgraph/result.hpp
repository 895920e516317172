#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace agentgraph {

// Error carried by value through every fallible runtime operation.
// `code` is one of the stable E_* identifiers that appear in logs and reports.
struct Error {
    std::string code;
    std::string message;

    bool operator==(const Error&) const = default;
};

inline Error make_error(std::string code, std::string message = {}) {
    return Error{std::move(code), std::move(message)};
}

// Minimal expected-like holder: either a value or an Error.
template <typename T>
class Result {
public:
    Result(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Result(Error error) : data_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return data_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() & { assert(ok()); return std::get<0>(data_); }
    const T& value() const& { assert(ok()); return std::get<0>(data_); }
    T&& value() && { assert(ok()); return std::get<0>(std::move(data_)); }

    const Error& error() const { assert(!ok()); return std::get<1>(data_); }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, Error> data_;
};

struct Unit {
    bool operator==(const Unit&) const = default;
};

using Status = Result<Unit>;

inline Status ok_status() { return Unit{}; }

}  // namespace agentgraph
