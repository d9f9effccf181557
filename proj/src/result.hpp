#ifndef SR6SFC_RESULT_HPP
#define SR6SFC_RESULT_HPP

#include <cassert>
#include <optional>
#include <utility>
#include <variant>

namespace sr6 {

// Small value-or-error holder used by the codec and configuration layers.
template <typename T, typename E>
class Result {
public:
    Result(T v) : v_(std::in_place_index<0>, std::move(v)) {}
    Result(E e) : v_(std::in_place_index<1>, std::move(e)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() {
        assert(ok());
        return std::get<0>(v_);
    }
    const T& value() const {
        assert(ok());
        return std::get<0>(v_);
    }
    const E& error() const {
        assert(!ok());
        return std::get<1>(v_);
    }

private:
    std::variant<T, E> v_;
};

template <typename E>
class Status {
public:
    Status() = default;
    Status(E e) : e_(std::move(e)) {}
    static Status ok() { return Status(); }

    bool is_ok() const { return !e_.has_value(); }
    explicit operator bool() const { return is_ok(); }
    const E& error() const {
        assert(e_);
        return *e_;
    }

private:
    std::optional<E> e_;
};

}  // namespace sr6

#endif
