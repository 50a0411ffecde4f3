int readSensor(unsigned short raw) {
    return raw % 10;
}

void recordSample(unsigned short raw) {
    long long current = readSensor(raw);
    int scaled = current;
    long long keep = scaled;
    keep = keep + 2;
}
