#pragma once

// Minimal RFC 6455 pieces: handshake key, frame encoding, incremental frame
// parsing. Transport agnostic; the server feeds bytes in and writes bytes out.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parplay::ws {

inline constexpr std::string_view kHandshakeGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

enum class Opcode : std::uint8_t { Continuation = 0x0, Text = 0x1, Binary = 0x2, Close = 0x8, Ping = 0x9, Pong = 0xA };

inline std::string base64(const unsigned char* data, std::size_t n) {
  std::string out(4 * ((n + 2) / 3), '\0');
  const int len = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data, static_cast<int>(n));
  out.resize(static_cast<std::size_t>(len));
  return out;
}

/// Sec-WebSocket-Accept value for a client's Sec-WebSocket-Key.
inline std::string accept_key(std::string_view client_key) {
  const std::string input = std::string(client_key) + std::string(kHandshakeGuid);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(input.data(), input.size(), digest.data(), &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("websocket: SHA-1 failed");
  return base64(digest.data(), len);
}

/// One frame; the server sends unmasked frames, clients must mask.
inline std::string encode_frame(Opcode op, std::string_view payload, bool fin = true,
                                std::optional<std::array<std::uint8_t, 4>> mask = std::nullopt) {
  std::string out;
  out.push_back(static_cast<char>((fin ? 0x80 : 0x00) | static_cast<std::uint8_t>(op)));
  const std::uint8_t mask_bit = mask ? 0x80 : 0x00;
  const std::uint64_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(mask_bit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(mask_bit | 126));
    for (int s = 8; s >= 0; s -= 8) out.push_back(static_cast<char>((n >> s) & 0xFF));
  } else {
    out.push_back(static_cast<char>(mask_bit | 127));
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<char>((n >> s) & 0xFF));
  }
  if (!mask) {
    out.append(payload);
    return out;
  }
  for (std::uint8_t b : *mask) out.push_back(static_cast<char>(b));
  for (std::size_t i = 0; i < payload.size(); ++i)
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(payload[i]) ^ (*mask)[i % 4]));
  return out;
}

struct Frame {
  bool fin = true;
  Opcode opcode = Opcode::Text;
  std::string payload;
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Accumulates raw bytes and yields complete frames, unmasked.
class FrameParser {
 public:
  explicit FrameParser(std::size_t max_payload = 1 << 20) : max_payload_(max_payload) {}

  void feed(std::string_view bytes) { buffer_.append(bytes); }

  std::optional<Frame> next() {
    if (buffer_.size() < 2) return std::nullopt;
    const auto b0 = static_cast<std::uint8_t>(buffer_[0]);
    const auto b1 = static_cast<std::uint8_t>(buffer_[1]);
    if (b0 & 0x70) throw ProtocolError("websocket: reserved bits set");
    const bool masked = b1 & 0x80;
    std::uint64_t n = b1 & 0x7F;
    std::size_t pos = 2;
    if (n == 126 || n == 127) {
      const std::size_t width = n == 126 ? 2 : 8;
      if (buffer_.size() < pos + width) return std::nullopt;
      n = 0;
      for (std::size_t i = 0; i < width; ++i) n = (n << 8) | static_cast<std::uint8_t>(buffer_[pos + i]);
      pos += width;
    }
    if (n > max_payload_) throw ProtocolError("websocket: frame too large");
    std::array<std::uint8_t, 4> mask{};
    if (masked) {
      if (buffer_.size() < pos + 4) return std::nullopt;
      for (int i = 0; i < 4; ++i) mask[i] = static_cast<std::uint8_t>(buffer_[pos + i]);
      pos += 4;
    }
    if (buffer_.size() < pos + n) return std::nullopt;
    Frame f;
    f.fin = b0 & 0x80;
    f.opcode = static_cast<Opcode>(b0 & 0x0F);
    f.payload = buffer_.substr(pos, n);
    if (masked)
      for (std::size_t i = 0; i < f.payload.size(); ++i)
        f.payload[i] = static_cast<char>(static_cast<std::uint8_t>(f.payload[i]) ^ mask[i % 4]);
    buffer_.erase(0, pos + n);
    return f;
  }

 private:
  std::string buffer_;
  std::size_t max_payload_;
};

/// Joins fragmented data frames; control frames pass straight through.
class MessageAssembler {
 public:
  /// Returns a complete message (or control frame) when one is ready.
  std::optional<Frame> push(Frame f) {
    const bool control = static_cast<std::uint8_t>(f.opcode) & 0x08;
    if (control) return f;
    const bool fin = f.fin;
    if (f.opcode == Opcode::Continuation) {
      if (!partial_) throw ProtocolError("websocket: continuation without a message");
      partial_->payload += f.payload;
    } else {
      if (partial_) throw ProtocolError("websocket: interleaved messages");
      partial_ = std::move(f);
    }
    if (!fin) return std::nullopt;
    Frame out = std::move(*partial_);
    out.fin = true;
    partial_.reset();
    return out;
  }

 private:
  std::optional<Frame> partial_;
};

}  // namespace parplay::ws
