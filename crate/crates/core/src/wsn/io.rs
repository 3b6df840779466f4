//! Topology files: a `# key = value` header (radio range, aggregator) followed by CSV rows
//! `id,x,y,parent`, where the aggregator's parent cell is empty.

use std::io::{Read, Write};

use super::{ClusterTopology, Point};
use crate::textio::HeaderBlock;
use crate::{Error, Result};

impl ClusterTopology {
    pub fn write_to<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# radio_range = {}", self.radio_range())?;
        writeln!(writer, "# aggregator = {}", self.aggregator())?;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["id", "x", "y", "parent"])?;
        for (id, p) in self.positions().iter().enumerate() {
            let parent = self.parent(id).map(|p| p.to_string()).unwrap_or_default();
            w.write_record([id.to_string(), p.x.to_string(), p.y.to_string(), parent])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let (header, body) = HeaderBlock::split(&text, "topology")?;
        let radio_range: f64 = header.get("radio_range")?;
        let aggregator: usize = header.get("aggregator")?;
        let mut rows = Vec::new();
        for rec in csv::Reader::from_reader(body.as_bytes()).records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
            let id: usize = field(0)
                .parse()
                .map_err(|_| Error::format("topology", format!("bad node id {:?}", field(0))))?;
            let x: f64 = field(1)
                .parse()
                .map_err(|_| Error::format("topology", format!("bad x for node {id}")))?;
            let y: f64 = field(2)
                .parse()
                .map_err(|_| Error::format("topology", format!("bad y for node {id}")))?;
            let parent = match field(3).as_str() {
                "" => None,
                p => Some(
                    p.parse::<usize>()
                        .map_err(|_| Error::format("topology", format!("bad parent for node {id}")))?,
                ),
            };
            rows.push((id, Point::new(x, y), parent));
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
            return Err(Error::format("topology", "node ids must be 0..n without gaps"));
        }
        let positions = rows.iter().map(|r| r.1).collect();
        let parents = rows.iter().map(|r| r.2).collect();
        ClusterTopology::from_parents(positions, radio_range, aggregator, parents)
    }
}
