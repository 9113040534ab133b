use super::flat::{expectation, flatten, matvec, sandwich, trace, FlatChannel, FlatKind};
use super::EngineError;
use crate::machine::{tape, validate_spec, MachineSpec, Verdict, NSYM};
use crate::qkernel::C64;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Upper bound on `|states| * (n + 2)`.
    pub config_cap: usize,
    /// Upper bound on the number of renewal nodes.
    pub node_cap: usize,
    /// Work bound for one propagation between renewal points.
    pub pops_per_node: usize,
    /// Measurement outcomes whose probability is below this fraction of the
    /// incoming mass are dropped as rounding residue.
    pub branch_chop: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            config_cap: 20_000_000,
            node_cap: 4_000_000,
            pops_per_node: 2_000_000,
            branch_chop: 1e-24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSolution {
    pub p_accept: f64,
    pub p_reject: f64,
    /// Mass that never halts: trapped in non-halting loops or beyond the work bound.
    pub p_nonhalting: f64,
    /// `None` when halting is not almost sure.
    pub expected_steps: Option<f64>,
    pub residual: f64,
    pub configs: usize,
    pub renewal_nodes: usize,
}

const TRAP_TOL: f64 = 1e-12;

struct Node {
    edges: Vec<(u32, f64)>,
    absorb: [f64; 3],
    reward: f64,
}

/// Interns normalized pure states up to a global phase.
#[derive(Default)]
struct PostTable {
    ids: HashMap<Vec<(i64, i64)>, u32>,
    vecs: Vec<Vec<C64>>,
}

impl PostTable {
    fn intern(&mut self, v: &[C64]) -> u32 {
        let lead = v
            .iter()
            .find(|z| z.norm() > 1e-9)
            .copied()
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let w: Vec<C64> = v.iter().map(|z| z * phase / norm).collect();
        let key = w
            .iter()
            .map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64))
            .collect();
        if let Some(&k) = self.ids.get(&key) {
            return k;
        }
        let k = self.vecs.len() as u32;
        self.vecs.push(w);
        self.ids.insert(key, k);
        k
    }
}

/// Exact halting probabilities and expected running time.
///
/// Configurations whose channel has only rank-one branches leave the register
/// in one of finitely many pure states, so the run renews there. Densities are
/// propagated between renewal points and the renewal chain is solved by
/// state elimination with sum-computed outflows.
pub fn solve_exact(
    spec: &MachineSpec,
    input: &str,
    opts: &ExactOptions,
) -> Result<AbsorptionSolution, EngineError> {
    let rep = validate_spec(spec);
    if !rep.pass {
        return Err(EngineError::Invalid(format!(
            "{} at {}",
            rep.violations[0].rule, rep.violations[0].location
        )));
    }
    let tape = tape(input)?;
    let len = tape.len();
    let nconf = spec.states.len().saturating_mul(len);
    if nconf > opts.config_cap {
        return Err(EngineError::ResourceCap(format!(
            "{nconf} configurations exceed the cap {}",
            opts.config_cap
        )));
    }
    let d = spec.register_dim;
    let chans = flatten(spec);
    let mut posts = PostTable::default();
    let mut zero = vec![C64::new(0.0, 0.0); d];
    zero[0] = C64::new(1.0, 0.0);
    let start_post = posts.intern(&zero);
    let chan_posts: Vec<Option<Vec<Option<u32>>>> = chans
        .iter()
        .map(|c| {
            c.rank1.as_ref().map(|r| {
                r.iter()
                    .map(|(u, _)| (u.iter().any(|z| z.norm() > 0.0)).then(|| posts.intern(u)))
                    .collect()
            })
        })
        .collect();

    if let Some(v) = spec.is_halting(spec.q0) {
        let (a, r) = if v == Verdict::Accept {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        return Ok(AbsorptionSolution {
            p_accept: a,
            p_reject: r,
            p_nonhalting: 0.0,
            expected_steps: Some(0.0),
            residual: 0.0,
            configs: nconf,
            renewal_nodes: 0,
        });
    }

    let ctx = Ctx {
        spec,
        tape: &tape,
        len,
        d,
        chans: &chans,
        chan_posts: &chan_posts,
        rank: topo_rank(spec, &tape, &chans),
        chop: opts.branch_chop,
    };

    let start = (spec.q0 * len as u32, start_post);
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut keys = vec![start];
    index.insert(start, 0);
    let mut nodes: Vec<Node> = Vec::new();
    let mut k = 0;
    while k < keys.len() {
        let (conf, post) = keys[k];
        let (edges, absorb, reward) =
            ctx.propagate(conf, &posts.vecs[post as usize], opts.pops_per_node);
        let mut out = Vec::with_capacity(edges.len());
        for (key, p) in edges {
            let next = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = keys.len() as u32;
                    if keys.len() >= opts.node_cap {
                        return Err(EngineError::ResourceCap(format!(
                            "more than {} renewal nodes",
                            opts.node_cap
                        )));
                    }
                    keys.push(key);
                    index.insert(key, j);
                    j
                }
            };
            out.push((next, p));
        }
        out.sort_unstable_by_key(|e| e.0);
        nodes.push(Node {
            edges: out,
            absorb,
            reward,
        });
        k += 1;
    }
    let (acc, rej, lost, trap, reward) = eliminate(&nodes);
    let total = acc + rej + lost + trap;
    let nonhalting = lost + trap;
    Ok(AbsorptionSolution {
        p_accept: acc,
        p_reject: rej,
        p_nonhalting: nonhalting,
        expected_steps: (nonhalting < TRAP_TOL).then_some(reward),
        residual: (1.0 - total).abs(),
        configs: nconf,
        renewal_nodes: nodes.len(),
    })
}

struct Ctx<'a> {
    spec: &'a MachineSpec,
    tape: &'a [u8],
    len: usize,
    d: usize,
    chans: &'a [FlatChannel],
    chan_posts: &'a [Option<Vec<Option<u32>>>],
    rank: Vec<u32>,
    chop: f64,
}

type Edges = HashMap<(u32, u32), f64>;

impl Ctx<'_> {
    fn entry(&self, conf: u32) -> (&crate::machine::Entry, usize) {
        let q = conf as usize / self.len;
        let pos = conf as usize % self.len;
        let e = self.spec.table[q * NSYM + self.tape[pos] as usize]
            .as_ref()
            .expect("validated spec is total");
        (e, pos)
    }

    fn target(&self, pos: usize, nq: u32, mv: i8) -> Result<u32, Verdict> {
        match self.spec.is_halting(nq) {
            Some(v) => Err(v),
            None => Ok(nq * self.len as u32 + (pos as i64 + mv as i64) as u32),
        }
    }

    /// Pushes the pure state `u` at `start` forward to the next renewal points.
    fn propagate(&self, start: u32, u: &[C64], max_pops: usize) -> (Edges, [f64; 3], f64) {
        let d = self.d;
        let mut edges: Edges = HashMap::new();
        let mut absorb = [0.0f64; 3];
        let mut reward = 0.0;
        let mut pending: HashMap<u32, Mix> = HashMap::new();
        let mut heap = BinaryHeap::new();
        pending.insert(start, Mix::Pure(vec![u.to_vec()]));
        heap.push(Reverse((self.rank[start as usize], start)));
        let mut pops = 0usize;
        let halt = |absorb: &mut [f64; 3], v: Verdict, p: f64| match v {
            Verdict::Accept => absorb[0] += p,
            _ => absorb[1] += p,
        };
        while let Some(Reverse((_, x))) = heap.pop() {
            let Some(mix) = pending.remove(&x) else {
                continue;
            };
            pops += 1;
            if pops > max_pops {
                absorb[2] += mix.trace(d);
                break;
            }
            let t = mix.trace(d);
            if t <= 0.0 {
                continue;
            }
            reward += t;
            let (e, pos) = self.entry(x);
            let ch = &self.chans[e.channel];
            if let Some(pids) = &self.chan_posts[e.channel] {
                let r1 = ch.rank1.as_ref().unwrap();
                for (b, &(nq, mv)) in e.next.iter().enumerate() {
                    let Some(pid) = pids[b] else { continue };
                    let p = mix.expectation(&r1[b].1);
                    if p <= self.chop * t {
                        continue;
                    }
                    match self.target(pos, nq, mv) {
                        Err(v) => halt(&mut absorb, v, p),
                        Ok(y) => *edges.entry((y, pid)).or_insert(0.0) += p,
                    }
                }
                continue;
            }
            let mut forward = |y: Result<u32, Verdict>, r: Mix, absorb: &mut [f64; 3]| match y {
                Err(v) => halt(absorb, v, r.trace(d)),
                Ok(y) => match pending.remove(&y) {
                    Some(acc) => {
                        pending.insert(y, acc.merge(r, d));
                    }
                    None => {
                        pending.insert(y, r);
                        heap.push(Reverse((self.rank[y as usize], y)));
                    }
                },
            };
            match ch.kind {
                FlatKind::Identity => {
                    let (nq, mv) = e.next[0];
                    forward(self.target(pos, nq, mv), mix, &mut absorb);
                }
                _ => {
                    for (b, &(nq, mv)) in e.next.iter().enumerate() {
                        let out = mix.apply(&ch.ops[b], d);
                        if out.trace(d) <= 0.0 {
                            continue;
                        }
                        forward(self.target(pos, nq, mv), out, &mut absorb);
                    }
                }
            }
        }
        for mix in pending.values() {
            absorb[2] += mix.trace(d);
        }
        (edges, absorb, reward)
    }
}

/// Unnormalized register state between renewal points. Vectors are kept
/// while few paths merge, which keeps cancellations exact to rounding of
/// amplitudes rather than of probabilities.
enum Mix {
    Pure(Vec<Vec<C64>>),
    Dense(Vec<C64>),
}

const MAX_PURE: usize = 8;

impl Mix {
    fn trace(&self, d: usize) -> f64 {
        match self {
            Mix::Pure(vs) => vs.iter().flatten().map(|z| z.norm_sqr()).sum(),
            Mix::Dense(rho) => trace(rho, d),
        }
    }

    fn expectation(&self, psi: &[C64]) -> f64 {
        match self {
            Mix::Pure(vs) => vs
                .iter()
                .map(|v| {
                    psi.iter()
                        .zip(v)
                        .map(|(a, b)| a.conj() * b)
                        .sum::<C64>()
                        .norm_sqr()
                })
                .sum(),
            Mix::Dense(rho) => expectation(psi, rho),
        }
    }

    fn apply(&self, op: &[C64], d: usize) -> Mix {
        match self {
            Mix::Pure(vs) => Mix::Pure(
                vs.iter()
                    .map(|v| {
                        let mut out = vec![C64::new(0.0, 0.0); d];
                        matvec(op, v, &mut out);
                        out
                    })
                    .filter(|v| v.iter().any(|z| z.norm_sqr() > 0.0))
                    .collect(),
            ),
            Mix::Dense(rho) => {
                let mut tmp = vec![C64::new(0.0, 0.0); d * d];
                let mut out = vec![C64::new(0.0, 0.0); d * d];
                sandwich(op, rho, d, &mut tmp, &mut out);
                Mix::Dense(out)
            }
        }
    }

    fn dense(self, d: usize) -> Vec<C64> {
        match self {
            Mix::Dense(rho) => rho,
            Mix::Pure(vs) => {
                let mut rho = vec![C64::new(0.0, 0.0); d * d];
                for v in &vs {
                    for r in 0..d {
                        for c in 0..d {
                            rho[r * d + c] += v[r] * v[c].conj();
                        }
                    }
                }
                rho
            }
        }
    }

    fn merge(self, other: Mix, d: usize) -> Mix {
        match (self, other) {
            (Mix::Pure(mut a), Mix::Pure(b)) if a.len() + b.len() <= MAX_PURE => {
                a.extend(b);
                Mix::Pure(a)
            }
            (a, b) => {
                let mut rho = a.dense(d);
                for (x, y) in rho.iter_mut().zip(b.dense(d)) {
                    *x += y;
                }
                Mix::Dense(rho)
            }
        }
    }
}

/// Topological rank of configurations in the graph of non-renewal moves
/// (Tarjan's algorithm, iterative). Configurations of one cycle share a rank.
fn topo_rank(spec: &MachineSpec, tape: &[u8], chans: &[FlatChannel]) -> Vec<u32> {
    let len = tape.len();
    let n = spec.states.len() * len;
    let succ = |x: usize, out: &mut Vec<usize>| {
        out.clear();
        let q = x / len;
        let pos = x % len;
        if spec.is_halting(q as u32).is_some() {
            return;
        }
        let Some(e) = spec.table[q * NSYM + tape[pos] as usize].as_ref() else {
            return;
        };
        if chans[e.channel].rank1.is_some() {
            return;
        }
        for &(nq, mv) in &e.next {
            if spec.is_halting(nq).is_none() {
                out.push(nq as usize * len + (pos as i64 + mv as i64) as usize);
            }
        }
    };
    const UNSEEN: u32 = u32::MAX;
    let mut idx = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![0u32; n];
    let mut stack = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0u32;
    let mut buf = Vec::new();
    for root in 0..n {
        if idx[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        succ(root, &mut buf);
        idx[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, buf.clone(), 0));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if idx[w] == UNSEEN {
                    succ(w, &mut buf);
                    idx[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, buf.clone(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(idx[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == idx[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    // Tarjan emits components in reverse topological order.
    comp.iter().map(|&c| ncomp - 1 - c).collect()
}

/// State elimination on the renewal chain; node 0 is the start.
/// Returns (accept, reject, lost, trapped, expected reward).
fn eliminate(nodes: &[Node]) -> (f64, f64, f64, f64, f64) {
    let n = nodes.len();
    // nodes that can reach an exit
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, nd) in nodes.iter().enumerate() {
        for &(j, _) in &nd.edges {
            rev[j as usize].push(i as u32);
        }
    }
    let mut live = vec![false; n];
    let mut queue: Vec<usize> = (0..n)
        .filter(|&i| nodes[i].absorb.iter().any(|&a| a > 0.0))
        .collect();
    for &i in &queue {
        live[i] = true;
    }
    while let Some(j) = queue.pop() {
        for &i in &rev[j] {
            if !live[i as usize] {
                live[i as usize] = true;
                queue.push(i as usize);
            }
        }
    }
    if !live[0] {
        return (0.0, 0.0, 0.0, 1.0, f64::INFINITY);
    }
    // absorb: accept, reject, lost, trapped
    let mut absorb: Vec<[f64; 4]> = Vec::with_capacity(n);
    let mut out: Vec<HashMap<u32, f64>> = Vec::with_capacity(n);
    let mut inn: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let mut selfp = vec![0.0f64; n];
    let mut reward: Vec<f64> = nodes.iter().map(|x| x.reward).collect();
    for (i, nd) in nodes.iter().enumerate() {
        let mut a = [nd.absorb[0], nd.absorb[1], nd.absorb[2], 0.0];
        let mut o = HashMap::new();
        for &(j, p) in &nd.edges {
            if !live[j as usize] {
                a[3] += p;
            } else if j as usize == i {
                selfp[i] += p;
            } else {
                *o.entry(j).or_insert(0.0) += p;
                inn[j as usize].insert(i as u32);
            }
        }
        absorb.push(a);
        out.push(o);
    }
    let score =
        |i: usize, out: &[HashMap<u32, f64>], inn: &[HashSet<u32>]| inn[i].len() * out[i].len();
    let mut heap = BinaryHeap::new();
    let mut done = vec![false; n];
    for i in 1..n {
        if live[i] {
            heap.push(Reverse((score(i, &out, &inn), i)));
        } else {
            done[i] = true;
        }
    }
    while let Some(Reverse((s, k))) = heap.pop() {
        if done[k] {
            continue;
        }
        if s != score(k, &out, &inn) {
            heap.push(Reverse((score(k, &out, &inn), k)));
            continue;
        }
        done[k] = true;
        let outs: Vec<(u32, f64)> = out[k].iter().map(|(&j, &p)| (j, p)).collect();
        let ak = absorb[k];
        let exit: f64 = outs.iter().map(|e| e.1).sum::<f64>() + ak.iter().sum::<f64>();
        let rk = reward[k];
        let ins: Vec<u32> = inn[k].drain().collect();
        for &(j, _) in &outs {
            inn[j as usize].remove(&(k as u32));
        }
        for i in ins {
            let i = i as usize;
            let w = out[i].remove(&(k as u32)).unwrap_or(0.0);
            if w == 0.0 || exit == 0.0 {
                continue;
            }
            let f = w / exit;
            for &(j, p) in &outs {
                if j as usize == i {
                    selfp[i] += f * p;
                } else {
                    *out[i].entry(j).or_insert(0.0) += f * p;
                    inn[j as usize].insert(i as u32);
                }
            }
            for c in 0..4 {
                absorb[i][c] += f * ak[c];
            }
            reward[i] += f * rk;
            if i != 0 {
                heap.push(Reverse((score(i, &out, &inn), i)));
            }
        }
        for &(j, _) in &outs {
            let j = j as usize;
            if j != 0 && !done[j] {
                heap.push(Reverse((score(j, &out, &inn), j)));
            }
        }
        out[k].clear();
    }
    let a = absorb[0];
    let exit: f64 = out[0].values().sum::<f64>() + a.iter().sum::<f64>();
    if exit == 0.0 {
        return (0.0, 0.0, 0.0, 1.0, f64::INFINITY);
    }
    (
        a[0] / exit,
        a[1] / exit,
        a[2] / exit,
        a[3] / exit,
        reward[0] / exit,
    )
}
