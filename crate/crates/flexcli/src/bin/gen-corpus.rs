//! Regenerates the bundled corpus files from the flexcore builders.
//!
//! The files under `corpus/` are embedded into the `flex` binary at compile
//! time; a unit test pins them against the builders, so after changing a
//! builder run this tool and commit the refreshed files.

use std::fs;
use std::path::Path;

use flexcore::builtins;
use flexcore::formats::write_flexgraph;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    fs::create_dir_all(&dir).expect("corpus directory");
    let write = |name: &str, text: String| {
        let path = dir.join(format!("{name}.flexgraph"));
        fs::write(&path, text).expect("write corpus file");
        println!("wrote {}", path.display());
    };
    for (name, pg) in [
        ("dodecahedron", builtins::dodecahedron()),
        ("icosahedron", builtins::icosahedron()),
        ("icosidodecahedron", builtins::icosidodecahedron()),
        ("truncated-cube", builtins::truncated_cube()),
        ("cube", builtins::cube()),
    ] {
        write(name, write_flexgraph(&pg.graph, Some(&pg.rotation)));
    }
    for (name, g) in [
        ("petersen", builtins::petersen()),
        ("diamond", builtins::diamond()),
        ("house", builtins::house()),
        ("two-three-biclique", builtins::two_three_biclique()),
    ] {
        write(name, write_flexgraph(&g, None));
    }
}

