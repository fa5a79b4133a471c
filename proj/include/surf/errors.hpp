#pragma once

#include <stdexcept>
#include <string>

namespace surf {

// Base for every pipeline failure. `kind()` is the stable name used on the
// wire and in CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class MalformedTrace : public Error {
public:
    explicit MalformedTrace(const std::string& what) : Error("MalformedTrace", what) {}
};

class EmptyTokenSet : public Error {
public:
    EmptyTokenSet() : Error("EmptyTokenSet", "no usable tokens in stack trace") {}
};

class InvalidUrl : public Error {
public:
    explicit InvalidUrl(const std::string& url) : Error("InvalidUrl", "invalid url: " + url) {}
};

class ProviderError : public Error {
public:
    ProviderError(std::string provider_id, const std::string& cause)
        : Error("ProviderError", provider_id + ": " + cause), provider_id_(std::move(provider_id)) {}

    const std::string& provider_id() const noexcept { return provider_id_; }

private:
    std::string provider_id_;
};

class AllProvidersFailed : public Error {
public:
    explicit AllProvidersFailed(const std::string& what) : Error("AllProvidersFailed", what) {}
};

class FetchError : public Error {
public:
    FetchError(std::string url, const std::string& cause)
        : Error("FetchError", url + ": " + cause), url_(std::move(url)) {}

    const std::string& url() const noexcept { return url_; }

private:
    std::string url_;
};

// Network-level failure (DNS, connect, timeout) below any HTTP status.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error("TransportError", what) {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("EmptyCorpus", "corpus is empty") {}
};

class EmptyCandidate : public Error {
public:
    EmptyCandidate() : Error("EmptyCandidate", "candidate token set is empty") {}
};

}  // namespace surf
