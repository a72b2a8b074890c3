//! Byte-exact wire formats. Set `UPDATE_GOLDEN=1` to rewrite the dumps.

use std::fmt::Write as _;
use std::path::PathBuf;

use flightfec::block_codes::{ReedSolomon, RsParams};
use flightfec::fountain::fountain_encode;
use flightfec::framing::{legacy_pack, split_into_subpackets, CodewordEnvelope, Frame, SubPacket, FRAME_PAYLOAD_LEN};

fn dump(bytes: &[u8]) -> String {
    let mut s = String::new();
    for (i, line) in bytes.chunks(16).enumerate() {
        let hex: Vec<String> = line.iter().map(|b| format!("{b:02x}")).collect();
        writeln!(s, "{:08x}  {}", i * 16, hex.join(" ")).unwrap();
    }
    s
}

fn undump(text: &str) -> Vec<u8> {
    text.lines()
        .flat_map(|l| l.split_whitespace().skip(1))
        .map(|h| u8::from_str_radix(h, 16).unwrap())
        .collect()
}

fn check(name: &str, bytes: &[u8]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, dump(bytes)).unwrap();
    }
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(undump(&text), bytes, "{name} differs from golden dump");
    assert_eq!(text, dump(bytes));
}

fn sample_frame(t: u16) -> Frame {
    Frame::new(t, (0..FRAME_PAYLOAD_LEN).map(|i| (i * 7 + t as usize) as u8).collect()).unwrap()
}

// bitwise references, independent of the table-driven crate
fn crc32_ref(data: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in data {
        crc ^= b as u32;
        for _ in 0..8 {
            crc = if crc & 1 != 0 {
                (crc >> 1) ^ 0xEDB8_8320
            } else {
                crc >> 1
            };
        }
    }
    !crc
}

fn crc16_ref(data: &[u8]) -> u16 {
    let mut crc = 0xFFFFu16;
    for &b in data {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 {
                (crc << 1) ^ 0x1021
            } else {
                crc << 1
            };
        }
    }
    crc
}

fn trailing_crc32(bytes: &[u8]) -> (u32, u32) {
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    (u32::from_be_bytes(tail.try_into().unwrap()), crc32_ref(body))
}

#[test]
fn legacy_packet() {
    let data: Vec<u8> = (0..19u8).map(|i| i.wrapping_mul(29).wrapping_add(3)).collect();
    let bytes = legacy_pack(&data).unwrap();
    assert_eq!(bytes[0], 0x02);
    assert_eq!(bytes[43], 0x03);
    assert_eq!(&bytes[1..39], hex::encode_upper(&data).as_bytes());
    assert_eq!(&bytes[39..43], format!("{:04X}", crc16_ref(&data)).as_bytes());
    check("legacy_packet.hex", &bytes);
}

#[test]
fn telemetry_frame() {
    let bytes = sample_frame(465).to_bytes();
    assert_eq!(&bytes[..5], &[0xAA, 0x55, 0xAA, 0x01, 0xD1]);
    let (got, want) = trailing_crc32(&bytes);
    assert_eq!(got, want);
    check("frame.hex", &bytes);
}

#[test]
fn sub_packet() {
    let frame = sample_frame(12).to_bytes();
    let mut payload = [0u8; 33];
    payload.copy_from_slice(&frame[33 * 4..33 * 5]);
    let bytes = SubPacket { timestamp: 12, payload }.to_bytes();
    assert_eq!(bytes.len(), 42);
    let (got, want) = trailing_crc32(&bytes);
    assert_eq!(got, want);
    check("subpacket.hex", &bytes);

    let mut wire = Vec::new();
    split_into_subpackets(12, &frame, &mut wire);
    assert_eq!(&wire[42 * 4..42 * 5], &bytes[..]);
}

#[test]
fn codeword_envelope() {
    let frames: Vec<Vec<u8>> = (0..3).map(|t| sample_frame(t).to_bytes()).collect();
    let cw = fountain_encode(&frames, 5).unwrap();
    let bytes = CodewordEnvelope {
        descriptor: cw.descriptor,
        payload: cw.payload,
    }
    .to_bytes();
    assert_eq!(&bytes[..6], &[0, 0, 0, 5, 0, 3]);
    let (got, want) = trailing_crc32(&bytes);
    assert_eq!(got, want);
    check("envelope.hex", &bytes);
}

#[test]
fn rs_block() {
    let rs = ReedSolomon::new(RsParams::new(255, 223).unwrap());
    let data: Vec<u8> = (0..223u32).map(|i| (i * i + 1) as u8).collect();
    let block = rs.encode(&data).unwrap().into_symbols();
    assert_eq!(rs.syndromes(&block).iter().filter(|s| !s.is_zero()).count(), 0);
    check("rs255_223_block.hex", &block);
}
