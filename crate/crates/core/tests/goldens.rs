//! Pins the emitted kernel sources byte-for-byte.

use hetmap::kernelgen::{emit_fpga_kernel, emit_software_kernel};
use hetmap::taskgraph::{Task, TaskId};

fn task(id: u32, c: f64, p: f64, s: u32) -> Task {
    Task {
        id: TaskId(id),
        complexity: c,
        parallelizability: p,
        streamability: s,
    }
}

#[test]
fn software_sources_match_goldens() {
    assert_eq!(
        emit_software_kernel(&task(7, 1.0, 1.0, 3), 1).text,
        include_str!("golden/software_full_parallel.cl.txt")
    );
    assert_eq!(
        emit_software_kernel(&task(8, 2.5, 0.0, 1), 2).text,
        include_str!("golden/software_serial.cl.txt")
    );
    assert_eq!(
        emit_software_kernel(&task(9, 1.0, 0.5, 1), 1).text,
        include_str!("golden/software_mixed.cl.txt")
    );
}

#[test]
fn fpga_sources_match_goldens() {
    assert_eq!(
        emit_fpga_kernel(&task(4, 1.0, 0.37, 4), &[(TaskId(1), true), (TaskId(2), false)], true)
            .text,
        include_str!("golden/fpga_staged_streams.cl.txt")
    );
    assert_eq!(
        emit_fpga_kernel(&task(5, 3.0, 0.2, 1), &[(TaskId(0), false)], false).text,
        include_str!("golden/fpga_single_stage.cl.txt")
    );
}
