#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace footprint {

// Base for all toolkit errors. `name()` is the stable error identifier the
// CLI prints and maps to exit code 2.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class MalformedInput : public Error {
public:
    MalformedInput(const std::string& message, std::size_t byte_offset)
        : Error("MalformedInput",
                message + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

class MissingDataField : public Error {
public:
    explicit MissingDataField(const std::string& message)
        : Error("MissingDataField", message) {}
};

class EmptyDocument : public Error {
public:
    explicit EmptyDocument(const std::string& message)
        : Error("EmptyDocument", message) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message)
        : Error("DomainError", message) {}
};

class DuplicateSourceId : public Error {
public:
    explicit DuplicateSourceId(const std::string& message)
        : Error("DuplicateSourceId", message) {}
};

class UnknownInfectedId : public Error {
public:
    explicit UnknownInfectedId(const std::string& message)
        : Error("UnknownInfectedId", message) {}
};

class CorpusTooSmall : public Error {
public:
    explicit CorpusTooSmall(const std::string& message)
        : Error("CorpusTooSmall", message) {}
};

class DuplicateDocId : public Error {
public:
    explicit DuplicateDocId(const std::string& message)
        : Error("DuplicateDocId", message) {}
};

class UnknownDocId : public Error {
public:
    explicit UnknownDocId(const std::string& message)
        : Error("UnknownDocId", message) {}
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& message)
        : Error("IoFailure", message) {}
};

class DigestMismatch : public Error {
public:
    explicit DigestMismatch(const std::string& message)
        : Error("DigestMismatch", message) {}
};

class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& message)
        : Error("MissingFile", message) {}
};

class VersionUnsupported : public Error {
public:
    explicit VersionUnsupported(const std::string& message)
        : Error("VersionUnsupported", message) {}
};

} // namespace footprint
