// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_VLP16_HPP
#define LIDAR_BREATH_VLP16_HPP

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lidar_breath/error.hpp"
#include "lidar_breath/pointcloud.hpp"

namespace lidar_breath::vlp16 {

// Data packet layout: 12 blocks of 100 bytes, a 4-byte timestamp and two
// factory bytes (return mode, product id). Multi-byte fields are little-endian.
inline constexpr std::size_t kPacketSize = 1206;
inline constexpr std::size_t kBlocksPerPacket = 12;
inline constexpr std::size_t kBlockSize = 100;
inline constexpr std::size_t kRecordsPerBlock = 32;
inline constexpr std::size_t kLasers = 16;
inline constexpr std::size_t kTimestampOffset = 1200;
inline constexpr std::size_t kReturnModeOffset = 1204;
inline constexpr std::size_t kProductIdOffset = 1205;
inline constexpr std::uint8_t kFlagByte0 = 0xFF;
inline constexpr std::uint8_t kFlagByte1 = 0xEE;
inline constexpr std::uint16_t kAzimuthModulus = 36000;
inline constexpr double kDistanceUnit = 0.002;  // meters per raw count

inline constexpr std::uint8_t kStrongestReturn = 0x37;
inline constexpr std::uint8_t kLastReturn = 0x38;
inline constexpr std::uint8_t kDualReturn = 0x39;
inline constexpr std::uint8_t kProductVlp16 = 0x22;

using Packet = std::array<std::uint8_t, kPacketSize>;

struct LaserCalibration {
  std::array<double, kLasers> elevation_deg{-15, 1, -13, 3, -11, 5, -9, 7, -7, 9, -5, 11, -3, 13, -1, 15};
};

struct LaserReturn {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double range_m = 0.0;
  std::uint8_t reflectivity = 0;
  std::uint32_t timestamp_us = 0;
  std::uint8_t laser = 0;
  std::uint8_t block = 0;
};

struct ParsedPacket {
  std::uint32_t timestamp_us = 0;
  std::uint8_t return_mode = 0;
  std::array<std::uint16_t, kBlocksPerPacket> block_azimuth{};
  std::vector<LaserReturn> returns;  // zero-distance records omitted
};

namespace detail {

inline std::uint16_t read_u16(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return static_cast<std::uint16_t>(bytes[offset] | (bytes[offset + 1] << 8));
}

inline std::uint32_t read_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) | (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) | (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

inline void write_u16(std::span<std::uint8_t> bytes, std::size_t offset, std::uint16_t value) {
  bytes[offset] = static_cast<std::uint8_t>(value & 0xFF);
  bytes[offset + 1] = static_cast<std::uint8_t>(value >> 8);
}

inline void write_u32(std::span<std::uint8_t> bytes, std::size_t offset, std::uint32_t value) {
  for (std::size_t i = 0; i < 4; ++i) {
    bytes[offset + i] = static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF);
  }
}

}  // namespace detail

/// Azimuth (hundredths of a degree) of the second firing group in `block`:
/// halfway to the next block, or extrapolated from the previous gap for the
/// last block. Wraps at 360 degrees.
inline double second_firing_azimuth(const std::array<std::uint16_t, kBlocksPerPacket>& azimuth, std::size_t block) {
  const auto gap = [&](std::size_t from, std::size_t to) {
    return static_cast<double>((azimuth[to] + kAzimuthModulus - azimuth[from]) % kAzimuthModulus);
  };
  const double step = block + 1 < kBlocksPerPacket ? gap(block, block + 1) : gap(block - 1, block);
  return std::fmod(static_cast<double>(azimuth[block]) + step / 2.0, static_cast<double>(kAzimuthModulus));
}

inline ParsedPacket parse_packet_blocks(std::span<const std::uint8_t> bytes, const LaserCalibration& cal = {}) {
  if (bytes.size() != kPacketSize) {
    throw Error(ErrorCode::BadLength, "expected a " + std::to_string(kPacketSize) + "-byte packet, got " +
                                          std::to_string(bytes.size()));
  }
  ParsedPacket packet;
  packet.return_mode = bytes[kReturnModeOffset];
  if (packet.return_mode == kDualReturn) {
    throw Error(ErrorCode::DualReturn, "dual-return packets are not supported");
  }
  packet.timestamp_us = detail::read_u32(bytes, kTimestampOffset);
  for (std::size_t b = 0; b < kBlocksPerPacket; ++b) {
    const std::size_t base = b * kBlockSize;
    if (bytes[base] != kFlagByte0 || bytes[base + 1] != kFlagByte1) {
      throw Error(ErrorCode::BadBlockFlag, "block " + std::to_string(b) + " flag mismatch at byte offset " +
                                               std::to_string(base));
    }
    packet.block_azimuth[b] = detail::read_u16(bytes, base + 2);
    if (packet.block_azimuth[b] >= kAzimuthModulus) {
      throw Error(ErrorCode::BadAzimuth, "azimuth " + std::to_string(packet.block_azimuth[b]) +
                                             " out of range at byte offset " + std::to_string(base + 2));
    }
  }
  for (std::size_t b = 0; b < kBlocksPerPacket; ++b) {
    const std::size_t base = b * kBlockSize;
    const double first_az = static_cast<double>(packet.block_azimuth[b]) / 100.0;
    const double second_az = second_firing_azimuth(packet.block_azimuth, b) / 100.0;
    for (std::size_t r = 0; r < kRecordsPerBlock; ++r) {
      const std::size_t offset = base + 4 + 3 * r;
      const std::uint16_t distance = detail::read_u16(bytes, offset);
      if (distance == 0) {
        continue;
      }
      const std::size_t laser = r % kLasers;
      LaserReturn ret;
      ret.azimuth_deg = r < kLasers ? first_az : second_az;
      ret.elevation_deg = cal.elevation_deg[laser];
      ret.range_m = static_cast<double>(distance) * kDistanceUnit;
      ret.reflectivity = bytes[offset + 2];
      ret.timestamp_us = packet.timestamp_us;
      ret.laser = static_cast<std::uint8_t>(laser);
      ret.block = static_cast<std::uint8_t>(b);
      packet.returns.push_back(ret);
    }
  }
  return packet;
}

inline std::vector<LaserReturn> parse_packet(std::span<const std::uint8_t> bytes, const LaserCalibration& cal = {}) {
  return parse_packet_blocks(bytes, cal).returns;
}

/// Sensor frame: x right, y forward, z up.
inline Point3 to_cartesian(double azimuth_deg, double elevation_deg, double range_m) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double az = azimuth_deg * kDeg;
  const double el = elevation_deg * kDeg;
  const double horizontal = range_m * std::cos(el);
  return {horizontal * std::sin(az), horizontal * std::cos(az), range_m * std::sin(el)};
}

/// One block as raw wire values, used to synthesize packets.
struct BlockRecord {
  std::uint16_t azimuth = 0;
  std::array<std::uint16_t, kRecordsPerBlock> distance{};
  std::array<std::uint8_t, kRecordsPerBlock> reflectivity{};
};

inline Packet encode_packet(std::span<const BlockRecord, kBlocksPerPacket> blocks, std::uint32_t timestamp_us,
                            std::uint8_t return_mode = kStrongestReturn, std::uint8_t product_id = kProductVlp16) {
  Packet packet{};
  std::span<std::uint8_t> bytes(packet);
  for (std::size_t b = 0; b < kBlocksPerPacket; ++b) {
    const std::size_t base = b * kBlockSize;
    bytes[base] = kFlagByte0;
    bytes[base + 1] = kFlagByte1;
    detail::write_u16(bytes, base + 2, blocks[b].azimuth);
    for (std::size_t r = 0; r < kRecordsPerBlock; ++r) {
      detail::write_u16(bytes, base + 4 + 3 * r, blocks[b].distance[r]);
      bytes[base + 6 + 3 * r] = blocks[b].reflectivity[r];
    }
  }
  detail::write_u32(bytes, kTimestampOffset, timestamp_us);
  bytes[kReturnModeOffset] = return_mode;
  bytes[kProductIdOffset] = product_id;
  return packet;
}

/// Groups packets into rotations. A frame starts whenever a block azimuth is
/// smaller than the previous block's; its timestamp is the timestamp of the
/// packet that opened it, in seconds since the first packet.
inline FrameSequence assemble_frames(std::span<const Packet> packets, const LaserCalibration& cal = {}) {
  if (packets.empty()) {
    throw Error(ErrorCode::EmptyStream, "no packets to assemble");
  }
  FrameSequence seq;
  std::optional<std::uint16_t> previous_azimuth;
  std::uint64_t first_us = 0;
  std::uint64_t unwrap_offset = 0;
  std::uint32_t previous_us = 0;
  constexpr std::uint64_t kHourUs = 3'600'000'000ULL;

  for (std::size_t p = 0; p < packets.size(); ++p) {
    const ParsedPacket parsed = parse_packet_blocks(packets[p], cal);
    if (p == 0) {
      first_us = parsed.timestamp_us;
    } else if (parsed.timestamp_us < previous_us) {
      unwrap_offset += kHourUs;  // the sensor clock restarts at the top of each hour
    }
    previous_us = parsed.timestamp_us;
    const double packet_time =
        static_cast<double>(unwrap_offset + parsed.timestamp_us - first_us) / 1e6;

    std::size_t next_return = 0;
    for (std::size_t b = 0; b < kBlocksPerPacket; ++b) {
      const std::uint16_t az = parsed.block_azimuth[b];
      if (seq.frames.empty() || (previous_azimuth && az < *previous_azimuth)) {
        PointFrame frame;
        frame.index = seq.frames.size();
        frame.timestamp = packet_time;
        seq.frames.push_back(std::move(frame));
      }
      previous_azimuth = az;
      PointFrame& current = seq.frames.back();
      while (next_return < parsed.returns.size() && parsed.returns[next_return].block == b) {
        const LaserReturn& ret = parsed.returns[next_return];
        current.points.push_back(to_cartesian(ret.azimuth_deg, ret.elevation_deg, ret.range_m));
        ++next_return;
      }
    }
  }

  seq.nominal_rate = infer_nominal_rate(seq.frames);
  return seq;
}

/// Concatenated 1206-byte payloads without delimiters.
inline std::vector<Packet> read_packet_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open packet file " + path.string());
  }
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() % kPacketSize != 0) {
    throw Error(ErrorCode::BadLength, path.string() + ": size " + std::to_string(data.size()) +
                                          " is not a multiple of " + std::to_string(kPacketSize));
  }
  std::vector<Packet> packets(data.size() / kPacketSize);
  for (std::size_t i = 0; i < packets.size(); ++i) {
    std::memcpy(packets[i].data(), data.data() + i * kPacketSize, kPacketSize);
  }
  return packets;
}

inline void write_packet_file(const std::filesystem::path& path, std::span<const Packet> packets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write packet file " + path.string());
  }
  for (const Packet& packet : packets) {
    out.write(reinterpret_cast<const char*>(packet.data()), static_cast<std::streamsize>(packet.size()));
  }
  if (!out) {
    throw Error(ErrorCode::Io, "write failed for " + path.string());
  }
}

/// UDP source with the same semantics as a packet file: one payload per datagram.
class UdpListener {
 public:
  explicit UdpListener(std::uint16_t port, const std::string& bind_address = "0.0.0.0") {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
      throw Error(ErrorCode::Io, "cannot create UDP socket");
    }
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
      ::close(fd_);
      throw Error(ErrorCode::InvalidConfig, "invalid bind address " + bind_address);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::Io, "cannot bind UDP port " + std::to_string(port));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  UdpListener(const UdpListener&) = delete;
  UdpListener& operator=(const UdpListener&) = delete;

  ~UdpListener() {
    if (fd_ >= 0) {
      ::close(fd_);
    }
  }

  std::uint16_t port() const noexcept { return port_; }

  /// Waits up to `timeout` for one datagram. Returns nullopt on timeout.
  std::optional<Packet> receive(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (ready <= 0) {
      return std::nullopt;
    }
    std::array<std::uint8_t, kPacketSize + 1> buffer{};
    const ssize_t got = ::recv(fd_, buffer.data(), buffer.size(), 0);
    if (got < 0) {
      throw Error(ErrorCode::Io, "UDP receive failed");
    }
    if (static_cast<std::size_t>(got) != kPacketSize) {
      throw Error(ErrorCode::BadLength, "datagram of " + std::to_string(got) + " bytes");
    }
    Packet packet;
    std::memcpy(packet.data(), buffer.data(), kPacketSize);
    return packet;
  }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace lidar_breath::vlp16

#endif  // LIDAR_BREATH_VLP16_HPP
