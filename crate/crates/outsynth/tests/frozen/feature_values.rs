// Frozen oracle values generated by tools/feature_oracle.py.
// Test images use pixel(i) = (i * 0.6180339887498949) mod 1.

pub const IM8: &[f64] = &[
    0.0, 0.6180339887498949, 0.2360679774997898, 0.8541019662496847,
    0.4721359549995796, 0.09016994374947451, 0.7082039324993694, 0.3262379212492643,
    0.9442719099991592, 0.5623058987490541, 0.18033988749894903, 0.7983738762488439,
    0.41640786499873883, 0.03444185374863373, 0.6524758424985286, 0.27050983124842354,
    0.8885438199983184, 0.5065778087482133, 0.12461179749810825, 0.7426457862480031,
    0.36067977499789805, 0.978713763747793, 0.5967477524976879, 0.21478174124758276,
    0.8328157299974777, 0.45084971874737256, 0.06888370749726747, 0.6869176962471641,
    0.30495168499705727, 0.9229856737469504, 0.5410196624968471, 0.15905365124674375,
    0.7770876399966369, 0.39512162874653, 0.013155617496426686, 0.6311896062463234,
    0.2492235949962165, 0.8672575837461096, 0.4852915724960063, 0.10332556124590297,
    0.7213595499957961, 0.3393935387456892, 0.9574275274955859, 0.5754615162454826,
    0.1934955049953757, 0.8115294937452688, 0.4295634824951655, 0.047597471245062195,
    0.6656314599949553, 0.28366544874484845, 0.9016994374947451, 0.5197334262446418,
    0.13776741499453493, 0.7558014037444281, 0.3738353924943283, 0.9918693812442214,
    0.6099033699941145, 0.22793735874400767, 0.8459713474939008, 0.464005336243801,
    0.08203932499369415, 0.7000733137435873, 0.3181073024934875, 0.9361412912433806,
];

pub const HOG_IM8_O4_C2_B1: &[f64] = &[
    0.4561961946212785, 0.6668718159708872, 0.5715099281026995, 0.14332974274885682,
    0.0, 0.0, 0.0, 0.9999999999995071,
    0.8505761221990908, 0.5084538604923149, 0.0, 0.1341451903532617,
    0.8413374392011024, 0.0, 0.0, 0.5405102343132637,
    0.9999999999999087, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.0, 0.9999999999995414,
    0.0, 0.7612414847061254, 0.0, 0.6484685049882748,
    0.9999999999999087, 0.0, 0.0, 0.0,
    0.986418912363038, 0.0, 0.0, 0.16424898578720443,
    0.3838511586423043, 0.9142268198947294, 0.0, 0.12979834280098967,
    0.0, 0.0, 0.0, 0.9999999999995414,
    0.8951271672320358, 0.0, 0.4458108954286994, 0.0,
    0.8413374392011054, 0.0, 0.0, 0.5405102343132594,
    0.9503471122373335, 0.0, 0.0, 0.31119184800019933,
    0.0, 0.0, 0.0, 0.9999999999995071,
    0.0, 0.6935845663597875, 0.0, 0.720375214250945,
];

pub const HOG_IM8_O9_C4_B2: &[f64] = &[
    0.3505829375353709, 0.0, 0.12714266888606146, 0.0,
    0.0, 0.10896141629267848, 0.0, 0.17646482949401296,
    0.0819797399773654, 0.5251919253472541, 0.0, 0.0,
    0.20715323530610683, 0.0, 0.0, 0.0,
    0.11764321966267502, 0.05465315998491027, 0.5251919253472552, 0.0,
    0.0, 0.20715323530610721, 0.0, 0.0,
    0.0, 0.11764321966267581, 0.05465315998491037, 0.2187795877215274,
    0.0, 0.12193794906758251, 0.0, 0.0,
    0.10896141629267841, 0.0, 0.20587563440968124, 0.15189032338535602,
];

pub const HOG_IM28_DEFAULT: &[f64] = &[
    0.0, 0.010037803091126542, 0.09080279656148435, 0.25718641374956186,
    0.0, 0.042765287422667345, 0.7193187290708448, 0.6373860207346232,
    0.0, 0.0, 0.009932118424032884, 0.07733313168952696,
    0.23562831863956654, 0.0, 0.04231502603345709, 0.7248876282926693,
    0.6412079227066746, 0.0, 0.0, 0.0,
    0.07709541531266983, 0.24430017504256682, 0.0, 0.04218495274590903,
    0.7360222017651625, 0.6251923461483878, 0.0, 0.0,
    0.009915030449819423, 0.06470797864181349, 0.25404075976155327, 0.0,
    0.04224222403464427, 0.7208740380932555, 0.6401047396815407, 0.0,
];

pub const LBP_IM8_UNIFORM_P4_R1: &[f64] = &[
    0.05555555555555555, 0.2777777777777778, 0.3055555555555556, 0.3055555555555556,
    0.05555555555555555, 0.0,
];

pub const LBP_IM8_UNIFORM_P8_R2: &[f64] = &[
    0.1875, 0.125, 0.0, 0.0,
    0.0, 0.0, 0.0, 0.125,
    0.125, 0.4375,
];

pub const LBP_IM8_VAR_P8_R2: &[f64] = &[
    0.0, 0.0, 0.3125, 0.3125,
    0.375, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.0, 0.0,
];

pub const LBP_IM12_UNIFORM_P4_R3: &[f64] = &[
    0.1388888888888889, 0.1388888888888889, 0.4444444444444444, 0.1388888888888889,
    0.1388888888888889, 0.0,
];

pub const HOG_IM12_O6_C3_B2: &[f64] = &[
    0.06420380672984015, 0.11475273772168325, 0.07370722737291041, 0.23802227489728964,
    0.30765037452471766, 0.0, 0.0, 0.0,
    0.07370722737291041, 0.09693743210116247, 0.3967370070671311, 0.13397370204271822,
    0.0642038067298404, 0.0, 0.0, 0.0,
    0.39673700706713305, 0.19717547993659099, 0.0, 0.0,
    0.0, 0.0, 0.6598440653206415, 0.0,
    0.0, 0.0, 0.07096677985047513, 0.09333328153002726,
    0.381986256200126, 0.12899253651905906, 0.0, 0.0,
    0.07096677985047513, 0.18666656306005452, 0.38198625620012566, 0.0,
    0.0, 0.0, 0.0, 0.0,
    0.6353109483054957, 0.0, 0.23188015467073989, 0.0,
    0.0, 0.0, 0.42487344423171236, 0.0,
    0.0, 0.0, 0.08017090732419274, 0.21087652221425987,
    0.4315284533053331, 0.0, 0.33178824246446387, 0.0,
    0.08017090732419274, 0.0, 0.2392677117116599, 0.2529556799133935,
    0.26195414854099375, 0.0, 0.0, 0.0,
    0.47997795015893097, 0.0, 0.0698340939234699, 0.0,
    0.0, 0.15345713384972173, 0.43152845330533424, 0.10723329103551027,
    0.058630015047762433, 0.0, 0.0, 0.0,
    0.36229466567656377, 0.18005788043653667, 0.0, 0.0,
    0.0, 0.0, 0.602560337920669, 0.0,
    0.058630015047762433, 0.0, 0.0, 0.1288366979695552,
    0.4805313444882135, 0.09002894021826809, 0.21992661188692655, 0.0,
    0.0, 0.0, 0.40297099682071486, 0.0,
    0.0, 0.0, 0.0, 0.0,
    0.5968709093178132, 0.0, 0.21785004514754155, 0.0,
    0.0, 0.0, 0.39916610862753427, 0.0,
    0.21785004514754155, 0.0, 0.0, 0.0,
    0.39916610862753454, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.47975063180243793, 0.0,
    0.2375001824787999, 0.0, 0.0, 0.0,
    0.43517100753495846, 0.0, 0.06331493561923962, 0.0,
    0.0, 0.13913159037555387, 0.3912443722523165, 0.09722283968619957,
    0.0, 0.0, 0.0, 0.0,
    0.5230242781002443, 0.0, 0.1266298712384787, 0.0,
    0.0, 0.0, 0.5189289328087825, 0.09722283968619957,
    0.07328250775276589, 0.0, 0.0, 0.16103486090022778,
    0.6006231100097331, 0.11252848057678125, 0.274889467920379, 0.0,
    0.0, 0.0, 0.5036793044415371, 0.0,
    0.21072724171295715, 0.0, 0.0841297539274999, 0.11064481190933947,
    0.25183965222076465, 0.11252848057678344, 0.1374447339601901, 0.0,
    0.0841297539274999, 0.11064481190933947, 0.25420968679583816, 0.15291817352707068,
    0.2483251289858409, 0.0, 0.0, 0.0,
    0.4550055307290685, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.5468630380255098, 0.0,
    0.12416256449292098, 0.0, 0.07599975420536897, 0.09995249143906505,
    0.22964376824109967, 0.1381407059814599, 0.0, 0.0,
    0.07599975420537008, 0.0999524914390642, 0.5425810322723784, 0.13814070598146097,
    0.0, 0.0, 0.0, 0.0,
    0.5279529107297507, 0.0, 0.12782314684993423, 0.0,
    0.0, 0.0, 0.5238189736304556, 0.0981390030080078,
    0.0, 0.0, 0.07337173781636902, 0.09649620676591207,
    0.5238189736304549, 0.13336390054171646, 0.0, 0.10691174365841485,
    0.07337173781636795, 0.23693888063191365, 0.17736228260968095, 0.09813900300800886,
];

