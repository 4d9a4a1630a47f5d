"""Write the bundled sulfuric-acid-plant case study instance.

Interfaces and the N / M / upper-interface shape of every catalog entry follow
the published plant tables.  Costs, memory sizes, failure probabilities and
timings were not published; the values below are synthetic but keep the
usual ordering (more channels per module is cheaper per channel, fieldbus
modules are slow).  A supervisory server is added as the level-1 device so
the controllers can hang off Ethernet switches.

    python scripts/build_case_study.py [out.json]
"""

import json
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "pcsarch" / "data" / "case_study.json"

INTERFACES = [
    {"id": "RS485", "name": "RS-485/Modbus RTU", "cycle_time_ms": 35},
    {"id": "ETH", "name": "Ethernet/Modbus TCP", "cycle_time_ms": 10},
    {"id": "ECAT", "name": "EtherCAT", "cycle_time_ms": 2},
]
IFACE = [f["id"] for f in INTERFACES]

SIGNAL_TYPES = [
    {"id": "AI", "name": "analog input", "r": 4, "w": 20},
    {"id": "DI", "name": "discrete input", "r": 1, "w": 2},
    {"id": "AO", "name": "analog output", "r": 4, "w": 10},
    {"id": "DO", "name": "discrete output", "r": 1, "w": 2},
]

# room -> signal counts per type; 1,068 signals in total
ROOMS = {
    "H1": {"AI": 100, "DI": 250, "AO": 32, "DO": 152},
    "H2": {"AI": 100, "DI": 250, "AO": 32, "DO": 152},
}


def device(id, name, cost, role, upper, m=(0, 0, 0), n=None, **extra):
    return {
        "id": id, "name": name, "cost": cost, "role": role, "upper_interface": upper,
        "child_capacity": dict(zip(IFACE, m)),
        "channel_capacity": {t["id"]: (n or {}).get(t["id"], 0) for t in SIGNAL_TYPES},
        **extra,
    }


def io(id, name, cost, upper, n, p, delay):
    return device(id, name, cost, "repeater", upper, n=n, failure_prob=p, delay=delay)


DEVICES = [
    device("SRV", "supervisory server", 400, "processor", "ETH", m=(0, 24, 0),
           memory=65536, failure_prob=0.0005, instr_time=0.0001),
    device("CU00062", "CU 00 062", 2400, "processor", "ETH", m=(4, 0, 40),
           memory=4096, failure_prob=0.001, instr_time=0.001),
    device("CU00021", "CU 00 021", 1100, "processor", "ETH", m=(2, 0, 10),
           memory=1024, failure_prob=0.001, instr_time=0.002),
    io("AI08031", "AI 08 031", 230, "ECAT", {"AI": 8}, 0.002, 0.5),
    io("AI16012", "AI 16 012", 380, "ECAT", {"AI": 16}, 0.002, 0.5),
    io("DI16032", "DI 16 032", 120, "ECAT", {"DI": 16}, 0.002, 0.5),
    io("DI32013", "DI 32 013", 190, "ECAT", {"DI": 32}, 0.002, 0.5),
    io("DO16021", "DO 16 021", 140, "ECAT", {"DO": 16}, 0.002, 0.5),
    io("DO32031", "DO 32 031", 220, "ECAT", {"DO": 32}, 0.002, 0.5),
    io("AO08031", "AO 08 031", 260, "ECAT", {"AO": 8}, 0.002, 0.5),
    device("SW8", "8 port Switch", 90, "repeater", "ETH", m=(0, 8, 0), failure_prob=0.001, delay=0.1),
    device("SW5", "5 port Switch", 60, "repeater", "ETH", m=(0, 4, 0), failure_prob=0.001, delay=0.1),
    io("AI8", "AI8", 170, "RS485", {"AI": 8}, 0.004, 2.0),
    io("DI8", "DI8", 70, "RS485", {"DI": 8}, 0.004, 2.0),
    io("DO4", "DO4", 50, "RS485", {"DO": 4}, 0.004, 2.0),
    io("AO2", "AO2", 90, "RS485", {"AO": 2}, 0.004, 2.0),
]


def build() -> dict:
    signals = []
    for room, counts in ROOMS.items():
        for t in SIGNAL_TYPES:
            for k in range(counts[t["id"]]):
                signals.append({"id": f"{room}-{t['id']}{k + 1:03d}", "type": t["id"], "room": room})
    return {
        "levels": 4,
        "interfaces": INTERFACES,
        "signal_types": SIGNAL_TYPES,
        "rooms": list(ROOMS),
        "signals": signals,
        "devices": DEVICES,
        "scan_deadline_ms": 100,
        "min_availability": 0.99,
    }


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else OUT
    doc = build()
    out.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {out}: {len(doc['signals'])} signals, {len(doc['devices'])} device types")
