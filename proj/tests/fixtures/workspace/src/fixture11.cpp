int phaseA(unsigned short x) {
    return x % 50;
}

int phaseB(unsigned short x) {
    return x % 60;
}

void combine(unsigned short x) {
    long long a = phaseA(x);
    long long b = phaseB(x);
    int first = a;
    int second = b;
    long long sum = first + second;
    sum = sum + 11;
}
