//! The bundled graph corpus: the named polyhedra and the forbidden-shape
//! exemplars, shipped as `flexgraph` files and embedded at compile time.
//!
//! Each entry advertises what the tests hold it to: whether its rotation is
//! a plane embedding, and which built-in family (by registered name) it
//! avoids. `src/bin/gen-corpus.rs` regenerates the files from the builders.

pub struct CorpusEntry {
    pub name: &'static str,
    /// Contents of the entry's `flexgraph` file.
    pub file: &'static str,
    /// Built-in family this graph is advertised to avoid, if any.
    pub family: Option<&'static str>,
    /// Whether the declared rotation is a plane embedding.
    pub plane: bool,
    /// What the graph is, for humans reading reports.
    pub note: &'static str,
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "dodecahedron",
        file: include_str!("../corpus/dodecahedron.flexgraph"),
        family: Some("c4+near-triangles"),
        plane: true,
        note: "3-regular on 20 vertices; twelve pentagonal faces",
    },
    CorpusEntry {
        name: "icosahedron",
        file: include_str!("../corpus/icosahedron.flexgraph"),
        family: None,
        plane: true,
        note: "5-regular on 12 vertices; twenty triangles, every triangle pair sharing an edge violates the diamond family",
    },
    CorpusEntry {
        name: "icosidodecahedron",
        file: include_str!("../corpus/icosidodecahedron.flexgraph"),
        family: Some("diamond"),
        plane: true,
        note: "4-regular on 30 vertices; twenty triangles and twelve pentagons, no two triangles sharing an edge",
    },
    CorpusEntry {
        name: "truncated-cube",
        file: include_str!("../corpus/truncated-cube.flexgraph"),
        family: Some("c4+c5+c6"),
        plane: true,
        note: "3-regular on 24 vertices; eight triangles and six octagons",
    },
    CorpusEntry {
        name: "cube",
        file: include_str!("../corpus/cube.flexgraph"),
        family: Some("house+k23"),
        plane: true,
        note: "3-regular on 8 vertices; six quadrilateral faces, triangle-free",
    },
    CorpusEntry {
        name: "petersen",
        file: include_str!("../corpus/petersen.flexgraph"),
        family: Some("diamond"),
        plane: false,
        note: "3-regular girth-5 graph on 10 vertices; admits no plane embedding",
    },
    CorpusEntry {
        name: "diamond",
        file: include_str!("../corpus/diamond.flexgraph"),
        family: None,
        plane: false,
        note: "two triangles sharing an edge; the diamond family's own pattern",
    },
    CorpusEntry {
        name: "house",
        file: include_str!("../corpus/house.flexgraph"),
        family: None,
        plane: false,
        note: "a 4-cycle with an apex over one edge; the house family's own pattern",
    },
    CorpusEntry {
        name: "two-three-biclique",
        file: include_str!("../corpus/two-three-biclique.flexgraph"),
        family: None,
        plane: false,
        note: "complete bipartite graph on parts of two and three vertices",
    },
];

pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}
