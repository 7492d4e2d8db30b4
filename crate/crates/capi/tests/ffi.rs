//! Exercises the C ABI the way a foreign caller would: through raw
//! pointers, status codes, and JSON strings.

use std::ffi::{CStr, CString};
use std::ptr;

use tqsim_capi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

unsafe fn take_string(raw: *mut std::ffi::c_char) -> String {
    assert!(!raw.is_null());
    let s = CStr::from_ptr(raw).to_str().unwrap().to_string();
    tqsim_string_free(raw);
    s
}

fn default_options(shots: u64, seed: u64) -> tqsim_run_options {
    tqsim_run_options {
        shots,
        seed,
        mem_budget_bytes: 0,
        copy_cost_gates: 0.0,
    }
}

#[test]
fn parse_inspect_free() {
    unsafe {
        let src = c("qreg q[3]; h q[0]; cx q[0],q[1]; cx q[0],q[2]; measure q -> c;");
        let mut circuit = ptr::null_mut();
        assert_eq!(
            tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit),
            tqsim_status::TQSIM_OK
        );
        let mut n_qubits = 0u32;
        let mut n_gates = 0u64;
        assert_eq!(
            tqsim_circuit_n_qubits(circuit, &mut n_qubits),
            tqsim_status::TQSIM_OK
        );
        assert_eq!(
            tqsim_circuit_n_gates(circuit, &mut n_gates),
            tqsim_status::TQSIM_OK
        );
        assert_eq!(n_qubits, 3);
        assert_eq!(n_gates, 3);
        tqsim_circuit_free(circuit);
    }
}

#[test]
fn parse_errors_set_status_and_message() {
    unsafe {
        let src = c("qreg q[1]; frobnicate q[0];");
        let mut circuit = ptr::null_mut();
        assert_eq!(
            tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit),
            tqsim_status::TQSIM_ERR_PARSE
        );
        let msg = CStr::from_ptr(tqsim_last_error_message())
            .to_str()
            .unwrap();
        assert!(msg.contains("frobnicate"), "message: {msg}");
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut circuit = ptr::null_mut();
        assert_eq!(
            tqsim_circuit_parse_qasm(ptr::null(), &mut circuit),
            tqsim_status::TQSIM_ERR_INVALID_ARGUMENT
        );
        let src = c("qreg q[1]; x q[0];");
        assert_eq!(
            tqsim_circuit_parse_qasm(src.as_ptr(), ptr::null_mut()),
            tqsim_status::TQSIM_ERR_NULL_POINTER
        );
        let mut n = 0u32;
        assert_eq!(
            tqsim_circuit_n_qubits(ptr::null(), &mut n),
            tqsim_status::TQSIM_ERR_INVALID_ARGUMENT
        );
        // frees tolerate null
        tqsim_circuit_free(ptr::null_mut());
        tqsim_noise_model_free(ptr::null_mut());
        tqsim_result_free(ptr::null_mut());
        tqsim_string_free(ptr::null_mut());
    }
}

#[test]
fn noise_model_schema_errors() {
    unsafe {
        let mut model = ptr::null_mut();
        let bad = c(r#"{"thermal":{"t1_us":10,"t2_us":25,"gate_time_ns":{"default":35}}}"#);
        assert_eq!(
            tqsim_noise_model_from_json(bad.as_ptr(), &mut model),
            tqsim_status::TQSIM_ERR_PARSE
        );
        let good = c(r#"{"depolarizing":{"p":0.001}}"#);
        assert_eq!(
            tqsim_noise_model_from_json(good.as_ptr(), &mut model),
            tqsim_status::TQSIM_OK
        );
        tqsim_noise_model_free(model);
    }
}

#[test]
fn baseline_run_produces_counts() {
    unsafe {
        let src = c("qreg q[3]; h q[0]; cx q[0],q[1]; cx q[0],q[2]; measure q -> c;");
        let mut circuit = ptr::null_mut();
        tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit);
        let mut model = ptr::null_mut();
        tqsim_noise_model_ideal(&mut model);

        let options = default_options(500, 11);
        let mut result = ptr::null_mut();
        assert_eq!(
            tqsim_run_baseline(circuit, model, &options, &mut result),
            tqsim_status::TQSIM_OK
        );
        let mut json = ptr::null_mut();
        assert_eq!(
            tqsim_result_counts_json(result, &mut json),
            tqsim_status::TQSIM_OK
        );
        let counts: std::collections::BTreeMap<String, u64> =
            serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(counts.values().sum::<u64>(), 500);
        for key in counts.keys() {
            assert!(key == "000" || key == "111", "stray outcome {key}");
        }
        tqsim_result_free(result);
        tqsim_noise_model_free(model);
        tqsim_circuit_free(circuit);
    }
}

#[test]
fn tree_run_with_arities_matches_reference_node_count() {
    unsafe {
        // 8-gate Bernstein-Vazirani oracle over 3 qubits
        let src = c(
            "qreg q[3]; x q[2]; h q[0]; h q[1]; h q[2]; cx q[0],q[2]; cx q[1],q[2]; h q[0]; h q[1]; measure q -> c;",
        );
        let mut circuit = ptr::null_mut();
        assert_eq!(
            tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit),
            tqsim_status::TQSIM_OK
        );
        let mut model = ptr::null_mut();
        let dc = c(r#"{"depolarizing":{"p":0.001}}"#);
        tqsim_noise_model_from_json(dc.as_ptr(), &mut model);

        let options = default_options(64, 3);
        let arities = [16u64, 2, 2];
        let mut result = ptr::null_mut();
        assert_eq!(
            tqsim_run_tree_with_arities(
                circuit,
                model,
                &options,
                arities.as_ptr(),
                arities.len(),
                &mut result
            ),
            tqsim_status::TQSIM_OK
        );
        let mut json = ptr::null_mut();
        tqsim_result_document_json(result, &mut json);
        let doc: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(doc["tree"]["nodes_executed"], 112);
        assert_eq!(doc["tree"]["arities"].as_array().unwrap().len(), 3);
        let total: u64 = doc["counts"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert_eq!(total, 64);
        tqsim_result_free(result);
        tqsim_noise_model_free(model);
        tqsim_circuit_free(circuit);
    }
}

#[test]
fn planned_tree_and_plan_json() {
    unsafe {
        let qasm = tqsim::bench::gen_qft(6, true).unwrap().to_qasm();
        let src = c(&qasm);
        let mut circuit = ptr::null_mut();
        tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit);
        let mut model = ptr::null_mut();
        let dc = c(r#"{"depolarizing":{"p":0.001}}"#);
        tqsim_noise_model_from_json(dc.as_ptr(), &mut model);

        let options = default_options(1000, 5);
        let mut json = ptr::null_mut();
        assert_eq!(
            tqsim_plan_json(circuit, model, &options, &mut json),
            tqsim_status::TQSIM_OK
        );
        let plan: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert!(plan["arities"].is_array());
        assert!(plan["boundaries"].is_array());
        assert!(plan["predicted_speedup"].as_f64().unwrap() >= 1.0);

        let mut result = ptr::null_mut();
        assert_eq!(
            tqsim_run_tree(circuit, model, &options, &mut result),
            tqsim_status::TQSIM_OK
        );
        let mut doc_json = ptr::null_mut();
        tqsim_result_document_json(result, &mut doc_json);
        let doc: serde_json::Value = serde_json::from_str(&take_string(doc_json)).unwrap();
        let total: u64 = doc["counts"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert!(total >= 1000);
        tqsim_result_free(result);
        tqsim_noise_model_free(model);
        tqsim_circuit_free(circuit);
    }
}

#[test]
fn runs_are_deterministic_through_the_abi() {
    unsafe {
        let src = c("qreg q[2]; h q[0]; cx q[0],q[1]; measure q -> c;");
        let mut circuit = ptr::null_mut();
        tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit);
        let mut model = ptr::null_mut();
        let dc = c(r#"{"depolarizing":{"p":0.01}}"#);
        tqsim_noise_model_from_json(dc.as_ptr(), &mut model);

        let options = default_options(2000, 77);
        let mut counts = Vec::new();
        for _ in 0..2 {
            let mut result = ptr::null_mut();
            assert_eq!(
                tqsim_run_baseline(circuit, model, &options, &mut result),
                tqsim_status::TQSIM_OK
            );
            let mut json = ptr::null_mut();
            tqsim_result_counts_json(result, &mut json);
            counts.push(take_string(json));
            tqsim_result_free(result);
        }
        assert_eq!(counts[0], counts[1]);
        tqsim_noise_model_free(model);
        tqsim_circuit_free(circuit);
    }
}

#[test]
fn capacity_errors_map_to_capacity_status() {
    unsafe {
        let qasm = tqsim::bench::gen_qft(10, false).unwrap().to_qasm();
        let src = c(&qasm);
        let mut circuit = ptr::null_mut();
        tqsim_circuit_parse_qasm(src.as_ptr(), &mut circuit);
        let mut model = ptr::null_mut();
        tqsim_noise_model_ideal(&mut model);

        // 2 statevectors of 2^10 amplitudes cannot host a deeper tree
        let options = tqsim_run_options {
            shots: 100,
            seed: 1,
            mem_budget_bytes: 2 * 16 * 1024,
            copy_cost_gates: 1.0,
        };
        let arities = [10u64, 10];
        let mut result = ptr::null_mut();
        assert_eq!(
            tqsim_run_tree_with_arities(
                circuit,
                model,
                &options,
                arities.as_ptr(),
                arities.len(),
                &mut result
            ),
            tqsim_status::TQSIM_ERR_CAPACITY
        );
        tqsim_noise_model_free(model);
        tqsim_circuit_free(circuit);
    }
}
