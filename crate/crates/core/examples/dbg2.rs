use slt_wfs::builder::Builder;
use slt_wfs::engine::{self, EngineConfig};
use slt_wfs::flags::Flags;
use slt_wfs::parser::parse_program;
use slt_wfs::stats::Stats;
use slt_wfs::tables::Tables;
use slt_wfs::tree::render_goal;

const SRC: &str = "\
q :- \\+ p(a, a), r(b).
p(a, X) :- \\+ s(a), q, p(Z, a).
r(Y).
q :- q, p(a, b), \\+ s(b).
s(a).
p(X, X) :- s(a), s(a), q.
";

fn main() {
    let prog = parse_program(SRC).unwrap();
    let query = slt_wfs::parser::parse_query("p(b, b)").unwrap();

    for (name, cfg) in [
        ("default", EngineConfig::default()),
        ("unopt", EngineConfig::unoptimized()),
    ] {
        match engine::run(&prog, &query, &cfg) {
            Ok(out) => println!(
                "{name} verdict={:?} slt={} sltp={} tb_f={:?}",
                out.verdict,
                out.stats.slt_calls,
                out.stats.sltp_calls,
                out.tb_f.iter().map(|a| a.to_string()).collect::<Vec<_>>()
            ),
            Err(e) => println!("{name} ERR {e}"),
        }
    }

    let cfg = EngineConfig::default();
    let mut tables = Tables::default();
    let mut flags = Flags::default();
    let mut stats = Stats::default();
    let mut b = Builder::new(&prog, &cfg, &mut tables, &mut flags, &mut stats);
    let r = b.run_query(&query);
    println!("build result: {:?} nodes={}", r, b.forest.nodes.len());
    println!("new answers: {:?}", b.new_answers.iter().map(|a| a.to_string()).collect::<Vec<_>>());
    for (i, n) in b.forest.nodes.iter().enumerate() {
        let leaf = match &n.leaf {
            None => "-".to_string(),
            Some(k) => format!("{k:?}"),
        };
        let frame = match &n.frame {
            None => String::new(),
            Some(f) => format!(
                "class={} s={} f={} u={} fl={} sels={:?}",
                f.class,
                f.n_success,
                f.n_fail,
                f.n_ustar,
                f.n_flounder,
                f.fail_sels.iter().map(|o| o.as_ref().map(|a| a.to_string())).collect::<Vec<_>>()
            ),
        };
        println!(
            "N{i} t={} p={:?} e={} leaf={leaf} goal=[{}]  {frame}",
            n.tree,
            n.parent,
            n.edge.label(),
            render_goal(&n.goal),
        );
    }
}
