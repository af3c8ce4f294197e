#pragma once

#include <fmt/format.h>

#include <stdexcept>
#include <string>
#include <utility>

namespace hgchain {

class RuntimeError : public std::runtime_error
{
public:
    explicit RuntimeError(const std::string& message)
    : std::runtime_error(message)
    {
    }

    template <typename... Args>
    explicit RuntimeError(fmt::format_string<Args...> format, Args&&... args)
    : std::runtime_error(fmt::format(format, std::forward<Args>(args)...))
    {
    }
};

/// Missing or inconsistent model configuration (unknown province, unknown dose-response form, ...)
class ConfigurationError : public RuntimeError
{
public:
    using RuntimeError::RuntimeError;
};

/// Problems with input tables detected while assembling model inputs (duplicate ids, bad shares, ...)
class IngestionError : public RuntimeError
{
public:
    using RuntimeError::RuntimeError;
};

class CflError : public RuntimeError
{
public:
    CflError(double dt, double maxStableDt);

    double max_stable_dt() const noexcept
    {
        return _maxStableDt;
    }

private:
    double _maxStableDt;
};

/// Pipeline failure, tagged with the stage that raised it.
class StageError : public RuntimeError
{
public:
    StageError(std::string stage, const std::string& detail);

    const std::string& stage() const noexcept
    {
        return _stage;
    }

private:
    std::string _stage;
};

}
