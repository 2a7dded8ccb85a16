fn main() {
    use ghost_core::arch::*;
    use ghost_core::engine::*;
    use ghost_core::dse::*;
    let dev = DeviceLibrary::default();
    let mem = MemoryModel::default();
    let limits = PhotonicLimits::design_defaults();
    let ws: Vec<Workload> = toy_workloads().into_iter().take(2).collect();
    for cfg in [ArchConfig::new(8,8,6,4,5), ArchConfig::new(4,4,6,4,5), ArchConfig::new(2,2,4,2,3)] {
        let vals: Vec<f64> = ws.iter().map(|w| simulate(&w.graph, &w.model, &cfg, &dev, &mem, &limits).unwrap().epb_per_gops).collect();
        println!("{:?} -> {:?}", cfg.as_vector(), vals);
    }
}
