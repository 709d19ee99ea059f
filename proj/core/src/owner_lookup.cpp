#include "garagemon/owner_lookup.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "garagemon/errors.hpp"
#include "garagemon/plates.hpp"

namespace garagemon::owner_lookup {

std::string_view source_name(Source source) {
  return source == Source::stub ? "stub" : "remote";
}

namespace protocol {

std::string make_request(std::string_view plate) {
  return "PLATE " + std::string(plate) + "\n";
}

std::string found_response(std::string_view owner_name) {
  return "OWNER " + std::string(owner_name) + "\n";
}

std::string not_found_response() { return "NOTFOUND\n"; }

std::optional<std::string> parse_response(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line == "NOTFOUND") return std::nullopt;
  if (line.starts_with("OWNER ") && line.size() > 6) return std::string(line.substr(6));
  throw ProtocolError("owner lookup: malformed response '" + std::string(line) + "'");
}

std::optional<std::string> parse_request(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.starts_with("PLATE ") || line.size() <= 6) return std::nullopt;
  return std::string(line.substr(6));
}

}  // namespace protocol

FixtureBackend::FixtureBackend(const std::filesystem::path& fixture_path,
                               std::chrono::milliseconds delay)
    : delay_(delay) {
  std::ifstream in(fixture_path);
  if (!in) throw ParseError(fixture_path.string() + ": cannot open fixture file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fixture_path.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw ParseError(fixture_path.string() + ": expected a JSON object mapping plate to owner");
  for (const auto& [plate, owner] : j.items()) {
    if (!owner.is_string())
      throw ParseError(fixture_path.string() + ": owner for '" + plate + "' must be a string");
    table_[plates::normalize_plate(plate)] = owner.get<std::string>();
  }
}

std::optional<std::string> FixtureBackend::fetch(const std::string& plate,
                                                 std::chrono::milliseconds deadline) {
  if (delay_.count() > 0) {
    if (delay_ > deadline)
      throw LookupTimeoutError("owner lookup timed out after " +
                               std::to_string(deadline.count()) + " ms");
    std::this_thread::sleep_for(delay_);
  }
  const auto it = table_.find(plate);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

}  // namespace

SocketBackend::SocketBackend(std::string host, std::uint16_t port)
    : host_(std::move(host)), port_(port) {}

std::optional<std::string> SocketBackend::fetch(const std::string& plate,
                                                std::chrono::milliseconds deadline) {
  const auto start = std::chrono::steady_clock::now();
  const auto remaining = [&]() -> int {
    const auto left =
        deadline - std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start);
    return static_cast<int>(left.count());
  };

  Fd sock;
  sock.fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (sock.fd < 0) throw ProtocolError("owner lookup: cannot create socket");

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1)
    throw ProtocolError("owner lookup: bad host '" + host_ + "'");
  if (::connect(sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw ProtocolError("owner lookup: cannot connect to " + host_ + ":" +
                        std::to_string(port_));

  const std::string request = protocol::make_request(plate);
  if (::send(sock.fd, request.data(), request.size(), 0) !=
      static_cast<ssize_t>(request.size()))
    throw ProtocolError("owner lookup: short write");

  std::string response;
  char buf[256];
  while (response.find('\n') == std::string::npos) {
    const int left = remaining();
    if (left <= 0)
      throw LookupTimeoutError("owner lookup timed out after " +
                               std::to_string(deadline.count()) + " ms");
    pollfd pfd{sock.fd, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, left);
    if (rc == 0)
      throw LookupTimeoutError("owner lookup timed out after " +
                               std::to_string(deadline.count()) + " ms");
    if (rc < 0) throw ProtocolError("owner lookup: poll failed");
    const ssize_t n = ::recv(sock.fd, buf, sizeof buf, 0);
    if (n < 0) throw ProtocolError("owner lookup: recv failed");
    if (n == 0) throw ProtocolError("owner lookup: connection closed mid-response");
    response.append(buf, static_cast<std::size_t>(n));
  }
  return protocol::parse_response(response.substr(0, response.find('\n') + 1));
}

Client::Client(std::shared_ptr<Backend> backend, std::chrono::milliseconds deadline)
    : backend_(std::move(backend)), deadline_(deadline) {
  if (!backend_) throw InputError("owner lookup: backend must not be null");
}

std::optional<OwnerRecord> Client::query_owner(const std::string& plate) const {
  if (!plates::is_valid_plate(plate))
    throw InputError("owner lookup: invalid plate '" + plate + "'");

  {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(plate);
    if (it != cache_.end()) return it->second;
  }

  const std::optional<std::string> owner = backend_->fetch(plate, deadline_);
  std::optional<OwnerRecord> record;
  if (owner) record = OwnerRecord{plate, *owner, backend_->source()};

  std::lock_guard lock(mutex_);
  cache_.emplace(plate, record);
  return record;
}

}  // namespace garagemon::owner_lookup
