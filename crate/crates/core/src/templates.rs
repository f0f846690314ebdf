//! Starter presentations for `new`.

use std::collections::BTreeMap;

use crate::chart::{
    AffectPreset, AffectProfile, AxisSpec, ChartBindings, ChartSpec, ChartType, ScaleKind, ScalesSpec, SizeSpec,
    TableBindings,
};
use crate::foreshadow::{AnnotationWidget, ForeshadowMode};
use crate::landmark::NormRect;
use crate::widget::{DataTableRef, GestureKind, GestureWidget, Operation, Presentation, Segment, Widget, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Scatter,
    BarRace,
}

pub const SCATTER_CSV: &str = "\
country,year,gdp,life,population,region
Avalon,2000,1200,52,30,South
Avalon,2010,2100,58,36,South
Avalon,2020,3900,63,41,South
Brisa,2000,8000,70,12,North
Brisa,2010,9500,73,13,North
Brisa,2020,11000,75,13,North
Corvo,2000,3000,60,55,East
Corvo,2010,2800,59,60,East
Corvo,2020,5200,66,64,East
Dunmore,2000,22000,77,8,North
Dunmore,2010,26000,79,8,North
Dunmore,2020,29000,81,9,North
Eskar,2000,600,45,20,South
Eskar,2010,900,50,26,South
Eskar,2020,1700,57,31,South
";

pub const BARRACE_CSV: &str = "\
city,year,visitors
Alder,2019,120
Alder,2020,90
Alder,2021,140
Birch,2019,100
Birch,2020,110
Birch,2021,105
Cedar,2019,80
Cedar,2020,95
Cedar,2021,150
Dogwood,2019,60
Dogwood,2020,70
Dogwood,2021,65
Elm,2019,40
Elm,2020,75
Elm,2021,90
";

/// A starter config whose data table points at `data.csv`, plus that CSV.
pub fn template(kind: TemplateKind) -> (Presentation, &'static str) {
    match kind {
        TemplateKind::Scatter => (scatter(), SCATTER_CSV),
        TemplateKind::BarRace => (barrace(), BARRACE_CSV),
    }
}

/// Moves every path-backed table of `p` inline, reading from `csv`.
pub fn inline_tables(mut p: Presentation, csv: &str) -> Presentation {
    for t in p.data_tables.values_mut() {
        if t.path.take().is_some() {
            t.csv = Some(csv.to_string());
        }
    }
    p
}

const CHART_FRAME: NormRect = NormRect::new(0.08, 0.12, 0.62, 0.78);

fn gestures(chart: &str, annotation: &str) -> Vec<Widget> {
    let mut point = GestureWidget::new("point-select", CHART_FRAME, GestureKind::Pointing, Operation::Selection, chart);
    point.label = Some("select".into());
    let mut frame = GestureWidget::new(
        "frame-foreshadow",
        NormRect::new(0.02, 0.05, 0.74, 0.93),
        GestureKind::RectangularFraming,
        Operation::Foreshadowing,
        chart,
    );
    frame.operation_params.foreshadow.mode = ForeshadowMode::Trajectory;
    frame.label = Some("foreshadow".into());
    let mut dial = GestureWidget::new(
        "dial-playback",
        NormRect::new(0.74, 0.5, 0.2, 0.4),
        GestureKind::Dialling,
        Operation::Playback,
        chart,
    );
    dial.label = Some("dial".into());
    let mut reveal = GestureWidget::new(
        "open-title",
        NormRect::new(0.76, 0.05, 0.22, 0.4),
        GestureKind::OpenHand,
        Operation::Annotation,
        annotation,
    );
    reveal.label = Some("title".into());
    vec![
        Widget::Gesture(reveal),
        Widget::Gesture(point),
        Widget::Gesture(frame),
        Widget::Gesture(dial),
    ]
}

fn assemble(chart: ChartSpec, table: TableBindings, title: &str) -> Presentation {
    let annotation = AnnotationWidget::text("title", NormRect::new(0.08, 0.02, 0.62, 0.08), title);
    let mut widgets = vec![Widget::Chart(chart.clone()), Widget::Annotation(annotation)];
    widgets.extend(gestures(&chart.id, "title"));
    let segment = Segment {
        id: "main".into(),
        name: "Main".into(),
        widgets: widgets.iter().map(|w| w.id().to_string()).collect(),
    };
    let mut data_tables = BTreeMap::new();
    data_tables.insert(
        chart.table.clone(),
        DataTableRef {
            path: Some("data.csv".into()),
            csv: None,
            bindings: table,
        },
    );
    Presentation {
        version: SCHEMA_VERSION,
        segments: vec![segment],
        data_tables,
        widgets,
        icons: BTreeMap::new(),
    }
}

fn scatter() -> Presentation {
    let table = TableBindings {
        key_field: "country".into(),
        time_field: "year".into(),
        value_fields: vec!["gdp".into(), "life".into(), "population".into()],
        color_field: Some("region".into()),
    };
    let chart = ChartSpec {
        id: "chart".into(),
        chart_type: ChartType::Scatterplot,
        frame: CHART_FRAME,
        table: "data".into(),
        bindings: ChartBindings {
            x: Some("gdp".into()),
            y: Some("life".into()),
            size: Some("population".into()),
            value: None,
        },
        scales: ScalesSpec {
            x: AxisSpec {
                kind: ScaleKind::Log10,
                domain: Some([300.0, 50000.0]),
            },
            y: AxisSpec {
                kind: ScaleKind::Linear,
                domain: Some([40.0, 85.0]),
            },
            size: SizeSpec::default(),
            ..Default::default()
        },
        keyframes: vec![2000.0, 2010.0, 2020.0],
        top_n: 10,
        affect_per_transition: vec![
            AffectProfile::preset(AffectPreset::Neutral),
            AffectProfile::preset(AffectPreset::Positive),
        ],
        base_opacity: 0.8,
        revolution_span: 1.0,
    };
    assemble(chart, table, "Wealth and health")
}

fn barrace() -> Presentation {
    let table = TableBindings {
        key_field: "city".into(),
        time_field: "year".into(),
        value_fields: vec!["visitors".into()],
        color_field: None,
    };
    let chart = ChartSpec {
        id: "chart".into(),
        chart_type: ChartType::BarChartRace,
        frame: CHART_FRAME,
        table: "data".into(),
        bindings: ChartBindings {
            value: Some("visitors".into()),
            ..Default::default()
        },
        scales: ScalesSpec::default(),
        keyframes: vec![2019.0, 2020.0, 2021.0],
        top_n: 5,
        affect_per_transition: vec![],
        base_opacity: 0.8,
        revolution_span: 1.0,
    };
    assemble(chart, table, "Visitors by city")
}
