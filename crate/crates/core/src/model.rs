//! Network, power and demand types shared by every other module.
//!
//! A [`NetworkInstance`] is an OLT-rooted GPON tree feeding eNodeBs, with user
//! devices (UDs) attached over licensed radio links and meshed together over
//! device-to-device links. Power is incremental only: VM overhead on every node
//! that hosts at least one VM, processing energy proportional to served work,
//! and transmission energy proportional to carried traffic.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeKind {
    Olt,
    Onu,
    Enodeb,
    Ud,
}

impl NodeKind {
    /// OLT and ONUs form the optical backbone.
    pub fn is_gpon(self) -> bool {
        matches!(self, NodeKind::Olt | NodeKind::Onu)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Olt => "OLT",
            NodeKind::Onu => "ONU",
            NodeKind::Enodeb => "ENODEB",
            NodeKind::Ud => "UD",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LinkKind {
    Fibre,
    Licensed,
    D2d,
}

impl LinkKind {
    /// Whether a link of this kind may join nodes of kinds `a` and `b`.
    pub fn admits(self, a: NodeKind, b: NodeKind) -> bool {
        use NodeKind::*;
        match self {
            LinkKind::Fibre => a != Ud && b != Ud,
            LinkKind::Licensed => matches!((a, b), (Enodeb, Ud) | (Ud, Enodeb)),
            LinkKind::D2d => a == Ud && b == Ud,
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkKind::Fibre => "FIBRE",
            LinkKind::Licensed => "LICENSED",
            LinkKind::D2d => "D2D",
        })
    }
}

/// Compute and power characteristics of one network element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub kind: NodeKind,
    /// Gcycles/s.
    pub capacity_f: f64,
    /// Cycles per instruction of this node's architecture.
    pub cpi: f64,
    /// Watts drawn while at least one VM is hosted.
    pub vm_overhead_w: f64,
    /// Watts per Gcycle/s of served work.
    pub proc_energy: f64,
}

/// A directed link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub kind: LinkKind,
    /// Mbit/s.
    pub capacity_b: f64,
    /// Watts per Mbit/s carried.
    pub tx_energy: f64,
}

/// A service demand originating at a UD.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub id: String,
    pub source: String,
    /// Jobs/s.
    pub arrival_a: f64,
    /// Ginstructions per job.
    pub instr: f64,
    /// Mbit/s from the source to the hosting node.
    pub traffic_t: f64,
    /// Seconds; infinite means unconstrained and is written as `null`.
    #[serde(serialize_with = "ser_latency", deserialize_with = "de_latency")]
    pub max_latency_l: f64,
}

fn ser_latency<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_infinite() {
        s.serialize_none()
    } else {
        s.serialize_some(value)
    }
}

fn de_latency<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkInstance {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
    #[serde(default)]
    pub requests: Vec<Request>,
}

/// Which node kinds may host VMs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HostingPolicy {
    /// VMs on GPON nodes (OLT and ONUs) only.
    Cran,
    /// VMs on every element.
    Fran,
}

impl HostingPolicy {
    pub const ALL: [HostingPolicy; 2] = [HostingPolicy::Cran, HostingPolicy::Fran];

    pub fn may_host(self, kind: NodeKind) -> bool {
        match self {
            HostingPolicy::Cran => kind.is_gpon(),
            HostingPolicy::Fran => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HostingPolicy::Cran => "cran",
            HostingPolicy::Fran => "fran",
        }
    }
}

impl fmt::Display for HostingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HostingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cran" | "c-ran" => Ok(HostingPolicy::Cran),
            "fran" | "f-ran" => Ok(HostingPolicy::Fran),
            other => Err(format!("unknown hosting policy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    DuplicateId,
    KindEndpointMismatch,
    UnknownEndpoint,
    NodeParameter,
    LinkParameter,
    RequestParameter,
    OltCount,
    Disconnected,
    UdUnreachable,
}

impl ViolationKind {
    fn label(self) -> &'static str {
        match self {
            ViolationKind::DuplicateId => "duplicate id",
            ViolationKind::KindEndpointMismatch => "kind/endpoint mismatch",
            ViolationKind::UnknownEndpoint => "unknown endpoint",
            ViolationKind::NodeParameter => "invalid node parameter",
            ViolationKind::LinkParameter => "invalid link parameter",
            ViolationKind::RequestParameter => "invalid request",
            ViolationKind::OltCount => "olt count",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::UdUnreachable => "ud cannot reach an eNodeB",
        }
    }
}

/// One broken instance invariant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, detail: impl Into<String>) -> Self {
        Violation {
            kind,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.detail)
    }
}

/// Every invariant violation in `instance`, sorted; empty means valid.
pub fn validate(instance: &NetworkInstance) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    let mut push = |kind, detail: String| {
        out.insert(Violation::new(kind, detail));
    };

    let mut seen = HashSet::new();
    let mut dup = BTreeSet::new();
    for id in instance
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(instance.links.iter().map(|l| &l.id))
    {
        if !seen.insert(id.as_str()) {
            dup.insert(id.clone());
        }
    }
    let mut req_ids = HashSet::new();
    for r in &instance.requests {
        if !req_ids.insert(r.id.as_str()) {
            dup.insert(r.id.clone());
        }
    }
    for id in dup {
        push(ViolationKind::DuplicateId, format!("`{id}`"));
    }

    let kinds: HashMap<&str, NodeKind> = instance
        .nodes
        .iter()
        .map(|n| (n.id.as_str(), n.kind))
        .collect();

    for n in &instance.nodes {
        if !(n.capacity_f > 0.0 && n.capacity_f.is_finite()) {
            push(ViolationKind::NodeParameter, format!("{}: capacity_f must be > 0", n.id));
        }
        if !(n.cpi >= 1.0 && n.cpi.is_finite()) {
            push(ViolationKind::NodeParameter, format!("{}: cpi must be >= 1", n.id));
        }
        if !(n.vm_overhead_w >= 0.0 && n.vm_overhead_w.is_finite()) {
            push(ViolationKind::NodeParameter, format!("{}: vm_overhead_w must be >= 0", n.id));
        }
        if !(n.proc_energy >= 0.0 && n.proc_energy.is_finite()) {
            push(ViolationKind::NodeParameter, format!("{}: proc_energy must be >= 0", n.id));
        }
    }

    for l in &instance.links {
        if !(l.capacity_b > 0.0) || l.capacity_b.is_nan() {
            push(ViolationKind::LinkParameter, format!("{}: capacity_b must be > 0", l.id));
        }
        if !(l.tx_energy >= 0.0 && l.tx_energy.is_finite()) {
            push(ViolationKind::LinkParameter, format!("{}: tx_energy must be >= 0", l.id));
        }
        let (a, b) = (kinds.get(l.from.as_str()), kinds.get(l.to.as_str()));
        if a.is_none() {
            push(ViolationKind::UnknownEndpoint, format!("{}: `{}`", l.id, l.from));
        }
        if b.is_none() {
            push(ViolationKind::UnknownEndpoint, format!("{}: `{}`", l.id, l.to));
        }
        if let (Some(&a), Some(&b)) = (a, b) {
            if l.from == l.to {
                push(ViolationKind::KindEndpointMismatch, format!("{}: self-loop", l.id));
            } else if !l.kind.admits(a, b) {
                push(
                    ViolationKind::KindEndpointMismatch,
                    format!("{}: {} link between {a} and {b}", l.id, l.kind),
                );
            }
        }
    }

    for r in &instance.requests {
        let bad = |what: &str| format!("{}: {what}", r.id);
        if !(r.arrival_a > 0.0 && r.arrival_a.is_finite()) {
            push(ViolationKind::RequestParameter, bad("arrival_a must be > 0"));
        }
        if !(r.instr > 0.0 && r.instr.is_finite()) {
            push(ViolationKind::RequestParameter, bad("instr must be > 0"));
        }
        if !(r.traffic_t >= 0.0 && r.traffic_t.is_finite()) {
            push(ViolationKind::RequestParameter, bad("traffic_t must be >= 0"));
        }
        if !(r.max_latency_l > 0.0) {
            push(ViolationKind::RequestParameter, bad("max_latency_l must be > 0"));
        }
        match kinds.get(r.source.as_str()) {
            Some(NodeKind::Ud) => {}
            Some(k) => push(ViolationKind::RequestParameter, bad(&format!("source is a {k}, not a UD"))),
            None => push(ViolationKind::UnknownEndpoint, bad(&format!("source `{}`", r.source))),
        }
    }

    let olts = instance.nodes.iter().filter(|n| n.kind == NodeKind::Olt).count();
    if olts != 1 {
        push(ViolationKind::OltCount, format!("expected exactly one OLT, found {olts}"));
    }

    // Connectivity is checked on the undirected graph over node ids, so duplicate
    // ids collapse into one vertex and do not cascade into extra reports.
    let ids: BTreeSet<&str> = kinds.keys().copied().collect();
    if let Some(&start) = ids.iter().next() {
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for l in &instance.links {
            if kinds.contains_key(l.from.as_str()) && kinds.contains_key(l.to.as_str()) {
                adj.entry(l.from.as_str()).or_default().push(l.to.as_str());
                adj.entry(l.to.as_str()).or_default().push(l.from.as_str());
            }
        }
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        for id in ids.iter().filter(|id| !seen.contains(**id)) {
            push(ViolationKind::Disconnected, format!("`{id}` is not connected to `{start}`"));
        }
    }

    // Directed reachability from each UD to an eNodeB over radio links.
    let mut radio: HashMap<&str, Vec<&str>> = HashMap::new();
    for l in &instance.links {
        if matches!(l.kind, LinkKind::Licensed | LinkKind::D2d) {
            radio.entry(l.from.as_str()).or_default().push(l.to.as_str());
        }
    }
    for (&id, _) in kinds.iter().filter(|(_, &k)| k == NodeKind::Ud) {
        let mut seen = HashSet::from([id]);
        let mut queue = VecDeque::from([id]);
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            if kinds.get(v) == Some(&NodeKind::Enodeb) {
                found = true;
                break;
            }
            for &w in radio.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if !found {
            push(ViolationKind::UdUnreachable, format!("`{id}`"));
        }
    }

    out.into_iter().collect()
}

/// Gcycles needed to run one job of `req` on `node`.
pub fn job_cycles(req: &Request, node: &NodeSpec) -> f64 {
    req.instr * node.cpi
}

/// Work rate (Gcycles/s) that `req` places on `node` when hosted there.
pub fn work_rate(req: &Request, node: &NodeSpec) -> f64 {
    req.arrival_a * job_cycles(req, node)
}

/// Ids of nodes allowed to host VMs under `policy`, in instance order.
pub fn hosting_set(instance: &NetworkInstance, policy: HostingPolicy) -> Vec<&str> {
    instance
        .nodes
        .iter()
        .filter(|n| policy.may_host(n.kind))
        .map(|n| n.id.as_str())
        .collect()
}

/// Incremental power split into its three components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub total_w: f64,
    pub proc_w: f64,
    pub vm_w: f64,
    pub traffic_w: f64,
}

impl PowerBreakdown {
    pub fn new(proc_w: f64, vm_w: f64, traffic_w: f64) -> Self {
        PowerBreakdown {
            total_w: proc_w + vm_w + traffic_w,
            proc_w,
            vm_w,
            traffic_w,
        }
    }
}

/// Index-based view of an instance with adjacency lists.
#[derive(Clone, Debug)]
pub struct Topology<'a> {
    pub instance: &'a NetworkInstance,
    node_index: HashMap<&'a str, usize>,
    /// `(from, to)` node indices per link.
    pub endpoints: Vec<(usize, usize)>,
    pub out_links: Vec<Vec<usize>>,
    pub in_links: Vec<Vec<usize>>,
    /// Source node index per request.
    pub sources: Vec<usize>,
}

impl<'a> Topology<'a> {
    /// Fails with the first unknown id; run [`validate`] first for a full report.
    pub fn new(instance: &'a NetworkInstance) -> Result<Self, String> {
        let node_index: HashMap<&str, usize> = instance
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let lookup = |id: &str| {
            node_index
                .get(id)
                .copied()
                .ok_or_else(|| format!("unknown node `{id}`"))
        };
        let n = instance.nodes.len();
        let mut out_links = vec![Vec::new(); n];
        let mut in_links = vec![Vec::new(); n];
        let mut endpoints = Vec::with_capacity(instance.links.len());
        for (li, l) in instance.links.iter().enumerate() {
            let (a, b) = (lookup(&l.from)?, lookup(&l.to)?);
            out_links[a].push(li);
            in_links[b].push(li);
            endpoints.push((a, b));
        }
        let sources = instance
            .requests
            .iter()
            .map(|r| lookup(&r.source))
            .collect::<Result<_, _>>()?;
        Ok(Topology {
            instance,
            node_index,
            endpoints,
            out_links,
            in_links,
            sources,
        })
    }

    pub fn node(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn node_count(&self) -> usize {
        self.instance.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.instance.links.len()
    }

    /// Indices of nodes allowed to host under `policy`, ascending.
    pub fn hosts(&self, policy: HostingPolicy) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| policy.may_host(self.instance.nodes[i].kind))
            .collect()
    }
}

/// Parameters for the synthetic reference topology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyParams {
    /// UDs in the service area of each eNodeB; one ONU per eNodeB.
    pub uds_per_cell: Vec<usize>,
    pub olt: NodeParams,
    pub onu: NodeParams,
    pub enodeb: NodeParams,
    pub ud: NodeParams,
    pub fibre: LinkParams,
    pub licensed: LinkParams,
    pub d2d: LinkParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeParams {
    pub capacity_f: f64,
    pub cpi: f64,
    pub vm_overhead_w: f64,
    pub proc_energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkParams {
    pub capacity_b: f64,
    pub tx_energy: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        let node = |capacity_f, cpi, vm_overhead_w, proc_energy| NodeParams {
            capacity_f,
            cpi,
            vm_overhead_w,
            proc_energy,
        };
        let link = |capacity_b, tx_energy| LinkParams { capacity_b, tx_energy };
        TopologyParams {
            uds_per_cell: vec![11, 10],
            olt: node(100.0, 1.0, 3.0, 4.0),
            onu: node(70.0, 1.0, 2.0, 4.0),
            enodeb: node(50.0, 1.2, 1.5, 4.3),
            ud: node(4.0, 2.0, 0.2, 3.9),
            fibre: link(10_000.0, 0.06),
            licensed: link(150.0, 0.05),
            // Dearer than licensed so that pooling requests on a neighbour's
            // VM rarely pays for the extra hop.
            d2d: link(50.0, 0.1),
        }
    }
}

/// Builds the reference F-RAN topology without requests.
///
/// `olt0` feeds `onu{c}`, each ONU feeds `enb{c}` over fibre, and the UDs of
/// cell `c` attach to `enb{c}` over licensed links and form a D2D ring. UDs are
/// numbered globally (`ud00`, `ud01`, ...). Every physical link is present in
/// both directions.
pub fn reference_topology(params: &TopologyParams) -> NetworkInstance {
    fn node(id: String, kind: NodeKind, p: &NodeParams) -> NodeSpec {
        NodeSpec {
            id,
            kind,
            capacity_f: p.capacity_f,
            cpi: p.cpi,
            vm_overhead_w: p.vm_overhead_w,
            proc_energy: p.proc_energy,
        }
    }
    let mut nodes = vec![node("olt0".into(), NodeKind::Olt, &params.olt)];
    let mut links = Vec::new();
    let mut both = |a: &str, b: &str, kind: LinkKind, p: &LinkParams| {
        for (from, to) in [(a, b), (b, a)] {
            links.push(LinkSpec {
                id: format!("{from}-{to}"),
                from: from.to_string(),
                to: to.to_string(),
                kind,
                capacity_b: p.capacity_b,
                tx_energy: p.tx_energy,
            });
        }
    };
    for c in 0..params.uds_per_cell.len() {
        nodes.push(node(format!("onu{c}"), NodeKind::Onu, &params.onu));
        both("olt0", &format!("onu{c}"), LinkKind::Fibre, &params.fibre);
    }
    for c in 0..params.uds_per_cell.len() {
        nodes.push(node(format!("enb{c}"), NodeKind::Enodeb, &params.enodeb));
        both(&format!("onu{c}"), &format!("enb{c}"), LinkKind::Fibre, &params.fibre);
    }
    let mut next = 0;
    for (c, &count) in params.uds_per_cell.iter().enumerate() {
        let ids: Vec<String> = (next..next + count).map(|i| format!("ud{i:02}")).collect();
        next += count;
        for id in &ids {
            nodes.push(node(id.clone(), NodeKind::Ud, &params.ud));
            both(id, &format!("enb{c}"), LinkKind::Licensed, &params.licensed);
        }
        // A ring of two is a single edge; a ring of one has none.
        let edges = match count {
            0 | 1 => 0,
            2 => 1,
            n => n,
        };
        for i in 0..edges {
            both(&ids[i], &ids[(i + 1) % count], LinkKind::D2d, &params.d2d);
        }
    }
    NetworkInstance {
        nodes,
        links,
        requests: Vec::new(),
    }
}
