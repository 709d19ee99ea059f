#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace garagemon::owner_lookup {

enum class Source { stub, remote };

std::string_view source_name(Source source);

struct OwnerRecord {
  std::string plate;
  std::string owner_name;
  Source source = Source::stub;

  friend bool operator==(const OwnerRecord&, const OwnerRecord&) = default;
};

// Line-oriented lookup protocol shared by client and server:
//   request   "PLATE <normalized>\n"
//   response  "OWNER <name>\n" | "NOTFOUND\n"
namespace protocol {
std::string make_request(std::string_view plate);
std::string found_response(std::string_view owner_name);
std::string not_found_response();
// Owner name, or nullopt for NOTFOUND. Throws ProtocolError on anything else.
std::optional<std::string> parse_response(std::string_view line);
// Plate of a request line, or nullopt when malformed (server side).
std::optional<std::string> parse_request(std::string_view line);
}  // namespace protocol

// One lookup attempt. Implementations enforce the deadline themselves and
// throw LookupTimeoutError when it passes, ProtocolError on bad responses.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::optional<std::string> fetch(const std::string& plate,
                                           std::chrono::milliseconds deadline) = 0;
  virtual Source source() const = 0;
};

// Answers from a JSON fixture file mapping plate -> owner_name. An optional
// artificial delay stands in for network latency in timeout tests.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(const std::filesystem::path& fixture_path,
                          std::chrono::milliseconds delay = std::chrono::milliseconds{0});
  std::optional<std::string> fetch(const std::string& plate,
                                   std::chrono::milliseconds deadline) override;
  Source source() const override { return Source::stub; }

 private:
  std::map<std::string, std::string> table_;
  std::chrono::milliseconds delay_;
};

// Speaks the line protocol over TCP; one connection per lookup.
class SocketBackend : public Backend {
 public:
  SocketBackend(std::string host, std::uint16_t port);
  std::optional<std::string> fetch(const std::string& plate,
                                   std::chrono::milliseconds deadline) override;
  Source source() const override { return Source::remote; }

 private:
  std::string host_;
  std::uint16_t port_;
};

// Validates plates, delegates to the backend and caches responses (found
// and not-found) per plate for the lifetime of the client. Thread-safe.
class Client {
 public:
  explicit Client(std::shared_ptr<Backend> backend,
                  std::chrono::milliseconds deadline = std::chrono::milliseconds{5000});

  // nullopt means the backend does not know the plate (a normal outcome).
  // Throws InputError (invalid plate), LookupTimeoutError, ProtocolError.
  std::optional<OwnerRecord> query_owner(const std::string& plate) const;

 private:
  std::shared_ptr<Backend> backend_;
  std::chrono::milliseconds deadline_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::optional<OwnerRecord>> cache_;
};

}  // namespace garagemon::owner_lookup
